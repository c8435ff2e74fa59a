/* cli.hpp -- batch front end; every operation reachable from a command.
 *
 * Exit codes: 0 success / "yes"; 1 law failure or "no"; 2 input error
 * (parse, validation, guardedness). Output is deterministic for
 * identical invocations.
 */

#ifndef PROCITER_CLI_HPP_
#define PROCITER_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace prociter::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prociter::cli

#endif
