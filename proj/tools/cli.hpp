// Copyright 2026 The crowdcount Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CROWDCOUNT_CLI_HPP
#define CROWDCOUNT_CLI_HPP

#include <string>
#include <vector>

namespace crowd::cli {

/// Runs one crowdcount subcommand (synth, gen-gt, augment, train, eval,
/// predict, ga-search). Returns 0 on success, 2 on a usage error and 1 on
/// a runtime error. Every run prints its fully resolved configuration
/// before doing any work.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);

}  // namespace crowd::cli

#endif  // CROWDCOUNT_CLI_HPP
