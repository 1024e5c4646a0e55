#include "dyner_cli/output.hpp"

#include <fstream>

#include <openssl/evp.h>

#include "dyner/errors.hpp"

namespace dyner::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kTaskFailed, "sha256: digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::error_code ec;
  std::filesystem::create_directories(root_, ec);
  if (ec) fail(ErrorCode::kTaskFailed, "cannot create " + root_.string() + ": " + ec.message());
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto target = root_ / name;
  const auto temp = root_ / ("." + name + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::kTaskFailed, "cannot write " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) fail(ErrorCode::kTaskFailed, "cannot rename to " + target.string() + ": " + ec.message());

  WrittenFile record{name, content.size(), sha256_hex(content)};
  for (auto& f : files_) {
    if (f.name == name) {
      f = record;
      return;
    }
  }
  files_.push_back(record);
}

void OutputDir::write_json(const std::string& name, const nlohmann::json& doc) {
  write(name, doc.dump(2) + "\n");
}

void OutputDir::write_index(nlohmann::json meta) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : files_) {
    list.push_back({{"name", f.name}, {"bytes", f.bytes}, {"sha256", f.sha256}});
  }
  meta["files"] = list;
  write_json("index.json", meta);
}

}  // namespace dyner::cli
