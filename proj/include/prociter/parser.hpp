/* parser.hpp -- concrete syntax for equation systems and step systems.
 */

#ifndef PROCITER_PARSER_HPP_
#define PROCITER_PARSER_HPP_

#include <stdexcept>
#include <string>

#include "prociter/term.hpp"

namespace prociter {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line, int col)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

// Grammar (';'-terminated declarations, '#' line comments):
//   system  := header* line+
//   header  := "effect" ("set"|"subdist"|"maybe") ";"
//            | "actions" ident ("," ident)* ";"
//            | "params" ident ("," ident)* ";"
//            | "vars" ident ("," ident)* ";"
//   line    := ident "=" term ";"
//   term    := ident | action "." term | "0" | "{" branch ("," branch)* "}" | "{" "}"
//   branch  := term | rational ":" term      rational := int "/" int | int
// "vars" may be omitted; the left-hand sides then declare the vars in
// source order. "tau" is always adjoined to the action set.
// Throws ParseError with line/column; undeclared identifiers, weight
// sums > 1 and duplicate equations are reported the same way.
EquationSystem parse_system(const std::string& text);

}  // namespace prociter

#endif
