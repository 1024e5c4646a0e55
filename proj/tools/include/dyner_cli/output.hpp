#ifndef DYNER_CLI_OUTPUT_HPP
#define DYNER_CLI_OUTPUT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace dyner::cli {

std::string sha256_hex(const std::string& bytes);

struct WrittenFile {
  std::string name;
  std::size_t bytes = 0;
  std::string sha256;
};

/// Output directory whose files are written via temp file + rename, so a
/// reader never observes a partially written file.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& doc);
  const std::vector<WrittenFile>& files() const { return files_; }

  /// index.json: `meta` plus the list of files written so far.
  void write_index(nlohmann::json meta);

 private:
  std::filesystem::path root_;
  std::vector<WrittenFile> files_;
};

}  // namespace dyner::cli

#endif  // DYNER_CLI_OUTPUT_HPP
