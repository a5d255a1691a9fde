#ifndef DOCKRL_CLI_HPP_
#define DOCKRL_CLI_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace dockrl {

// Entry point of the dockrl tool.  args excludes the program name.  Errors
// are reported as one line on err:
//   error kind=<config|io|format|usage|runtime> key=<dotted key or -> msg=<text>
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dockrl

#endif  // DOCKRL_CLI_HPP_
