/* Copyright 2026 The GazeAttend Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef GAZEATTEND_TOOLS_CLI_HPP_
#define GAZEATTEND_TOOLS_CLI_HPP_

namespace gazeattend::cli {

// Parses argv and runs one subcommand. Exit codes: 0 success, 2 config
// error (including bad flags), 3 data error, 4 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace gazeattend::cli

#endif  // GAZEATTEND_TOOLS_CLI_HPP_
