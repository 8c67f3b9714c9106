// fusions_cli.cc - Command-line front end (subcommands land as modules come
// online; see io module for the scenario format).

#include <cstdio>

int main() {
  std::puts("fusions CLI: subcommands not wired yet");
  return 1;
}
