#pragma once

#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tetra/scalar.hpp"
#include "tetra/tetrablock.hpp"

namespace tetra::cli {

// Echoed configuration of one verification run. Identical configs (including
// the seed) must produce byte-identical reports.
struct RunConfig {
  std::string subcommand;
  Scalar alpha{0.25, 0.0};
  std::optional<TetrablockPoint> point;
  int windowDepth = 8;
  int normDepthMax = 256;
  std::optional<double> tolOverride;  // --tol; otherwise the subcommand default
  int gridSize = 1024;
  std::uint64_t seed = 1;
  std::string format = "json";
  std::optional<std::string> outPath;

  double tol() const {
    if (tolOverride) return *tolOverride;
    return subcommand == "membership" ? 1e-6 : 1e-10;
  }
};

enum class CheckStatus { Pass, Fail, Unknown };

inline const char* statusName(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Unknown: return "unknown";
  }
  return "unknown";
}

// One verified claim: the anchor names the mathematical statement the check
// exercises, value carries a measured quantity (or bracket), and deviation is
// the distance from the asserted identity.
struct CheckEntry {
  std::string name;
  std::string paperAnchor;
  CheckStatus status = CheckStatus::Unknown;
  std::optional<std::variant<double, std::pair<double, double>>> value;
  double tolerance = 0.0;
  double deviation = 0.0;
};

inline CheckEntry makeCheck(std::string name, std::string anchor, double deviation,
                            double tolerance,
                            std::optional<std::variant<double, std::pair<double, double>>> value =
                                std::nullopt) {
  CheckEntry e;
  e.name = std::move(name);
  e.paperAnchor = std::move(anchor);
  e.deviation = deviation;
  e.tolerance = tolerance;
  e.status = deviation <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  e.value = std::move(value);
  return e;
}

struct Report {
  RunConfig config;
  std::vector<CheckEntry> checks;

  int count(CheckStatus s) const {
    int n = 0;
    for (const CheckEntry& c : checks) {
      if (c.status == s) ++n;
    }
    return n;
  }

  std::string verdict() const {
    if (count(CheckStatus::Fail) > 0) return "fail";
    if (count(CheckStatus::Unknown) > 0) return "unknown";
    return "pass";
  }
};

inline int exitCodeFor(const Report& r) { return r.verdict() == "pass" ? 0 : 1; }

namespace detail {

inline nlohmann::ordered_json valueJson(const CheckEntry& e) {
  if (!e.value) return nullptr;
  if (std::holds_alternative<double>(*e.value)) return std::get<double>(*e.value);
  const auto& [lo, hi] = std::get<std::pair<double, double>>(*e.value);
  return nlohmann::ordered_json::array({lo, hi});
}

}  // namespace detail

inline std::string emitJson(const Report& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["subcommand"] = r.config.subcommand;
  cfg["alpha"] = {r.config.alpha.real(), r.config.alpha.imag()};
  if (r.config.point) {
    cfg["point"] = {{r.config.point->x1.real(), r.config.point->x1.imag()},
                    {r.config.point->x2.real(), r.config.point->x2.imag()},
                    {r.config.point->x3.real(), r.config.point->x3.imag()}};
  } else {
    cfg["point"] = nullptr;
  }
  cfg["windowDepth"] = r.config.windowDepth;
  cfg["normDepthMax"] = r.config.normDepthMax;
  cfg["tol"] = r.config.tol();
  cfg["gridSize"] = r.config.gridSize;
  cfg["seed"] = r.config.seed;
  cfg["format"] = r.config.format;
  j["config"] = std::move(cfg);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckEntry& e : r.checks) {
    nlohmann::ordered_json c;
    c["name"] = e.name;
    c["paperAnchor"] = e.paperAnchor;
    c["status"] = statusName(e.status);
    c["value"] = detail::valueJson(e);
    c["tolerance"] = e.tolerance;
    c["deviation"] = e.deviation;
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  nlohmann::ordered_json summary;
  summary["pass"] = r.count(CheckStatus::Pass);
  summary["fail"] = r.count(CheckStatus::Fail);
  summary["unknown"] = r.count(CheckStatus::Unknown);
  summary["verdict"] = r.verdict();
  j["summary"] = std::move(summary);
  return j.dump(2) + "\n";
}

inline std::string emitText(const Report& r) {
  std::ostringstream os;
  os << "run: " << r.config.subcommand << "  alpha=(" << r.config.alpha.real() << ","
     << r.config.alpha.imag() << ")  depth=" << r.config.windowDepth
     << "  tol=" << r.config.tol() << "  seed=" << r.config.seed << "\n";
  if (r.config.point) {
    os << "point: (" << r.config.point->x1.real() << "+" << r.config.point->x1.imag() << "i, "
       << r.config.point->x2.real() << "+" << r.config.point->x2.imag() << "i, "
       << r.config.point->x3.real() << "+" << r.config.point->x3.imag() << "i)\n";
  }
  std::size_t nameWidth = 4;
  for (const CheckEntry& e : r.checks) nameWidth = std::max(nameWidth, e.name.size());
  os << std::left << std::setw(9) << "status" << std::setw(static_cast<int>(nameWidth + 2))
     << "name" << std::setw(14) << "deviation" << std::setw(14) << "tolerance"
     << "claim\n";
  for (const CheckEntry& e : r.checks) {
    std::ostringstream dev, tol;
    dev << std::scientific << std::setprecision(3) << e.deviation;
    tol << std::scientific << std::setprecision(3) << e.tolerance;
    os << std::left << std::setw(9) << statusName(e.status)
       << std::setw(static_cast<int>(nameWidth + 2)) << e.name << std::setw(14) << dev.str()
       << std::setw(14) << tol.str() << e.paperAnchor << "\n";
  }
  os << "summary: " << r.count(CheckStatus::Pass) << " pass, " << r.count(CheckStatus::Fail)
     << " fail, " << r.count(CheckStatus::Unknown) << " unknown -> " << r.verdict() << "\n";
  return os.str();
}

inline std::string emitReport(const Report& r) {
  return r.config.format == "text" ? emitText(r) : emitJson(r);
}

}  // namespace tetra::cli
