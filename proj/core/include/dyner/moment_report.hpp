#ifndef DYNER_MOMENT_REPORT_HPP
#define DYNER_MOMENT_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

namespace dyner {

/// One named quantity together with the formula or procedure that produced it.
struct MomentEntry {
  std::string name;
  double value = 0.0;
  std::string provenance;
};

struct MomentReport {
  std::string model;
  int edges = 0;
  std::vector<MomentEntry> entries;

  void add(std::string name, double value, std::string provenance) {
    entries.push_back({std::move(name), value, std::move(provenance)});
  }

  std::optional<double> find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return e.value;
    }
    return std::nullopt;
  }
};

}  // namespace dyner

#endif  // DYNER_MOMENT_REPORT_HPP
