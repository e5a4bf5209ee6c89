#include <cstdio>
#include <string>
#include <vector>

#include "stt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  stt::ParseResult parsed = stt::parse_config(args);
  if (parsed.status != stt::kExitOk) {
    std::fputs(parsed.message.c_str(), stderr);
    return parsed.status;
  }
  if (!parsed.message.empty()) {  // help text
    std::fputs(parsed.message.c_str(), stdout);
    return stt::kExitOk;
  }
  return stt::dispatch(parsed.config);
}
