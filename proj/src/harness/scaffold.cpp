// Copyright 2026 The rex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <system_error>

#include "rex/harness.hpp"
#include "util/files.hpp"

namespace rex::harness {

namespace fs = std::filesystem;

std::string foundry_toml(std::string_view solc_version) {
  std::string out;
  out += "[profile.default]\n";
  out += "src = \"src\"\n";
  out += "test = \"test\"\n";
  out += "out = \"out\"\n";
  out += "libs = [\"lib\"]\n";
  out += "solc_version = \"" + std::string(solc_version) + "\"\n";
  out += "via_ir = false\n";
  out += "offline = true\n";
  out += "remappings = [\"forge-std/=lib/forge-std/src/\"]\n";
  return out;
}

void scaffold_project(const fs::path& project_dir, std::string_view target_source,
                      const ScriptPair& scripts, std::string_view solc_version,
                      const fs::path& forge_std_dir) {
  std::error_code ec;
  const fs::path forge_std = fs::absolute(forge_std_dir, ec);
  if (ec || !fs::is_regular_file(forge_std / "src" / "Test.sol")) {
    throw Error(ErrorCode::kTemplateMissing,
                "no forge-std checkout at " + forge_std_dir.string());
  }
  // create_directory reports false for an existing directory; attempt dirs
  // are write-once so that is an error, not a no-op.
  fs::create_directories(project_dir.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kIo, project_dir.parent_path().string() + ": " + ec.message());
  if (!fs::create_directory(project_dir, ec)) {
    if (ec) throw Error(ErrorCode::kIo, project_dir.string() + ": " + ec.message());
    throw Error(ErrorCode::kAttemptDirExists, project_dir.string());
  }
  for (const char* sub : {"src", "test", "lib"}) {
    fs::create_directory(project_dir / sub, ec);
    if (ec) throw Error(ErrorCode::kIo, (project_dir / sub).string() + ": " + ec.message());
  }
  util::write_file_atomic(project_dir / "src" / "Target.sol", target_source);
  util::write_file_atomic(project_dir / "src" / "Exploit.sol", scripts.exploit_source);
  util::write_file_atomic(project_dir / "test" / "Exploit.t.sol", scripts.test_source);
  util::write_file_atomic(project_dir / "foundry.toml", foundry_toml(solc_version));
  fs::create_directory_symlink(forge_std, project_dir / "lib" / "forge-std", ec);
  if (ec) throw Error(ErrorCode::kIo, "linking forge-std: " + ec.message());
}

}  // namespace rex::harness
