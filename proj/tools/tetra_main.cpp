// Command-line front end: parses one subcommand plus options into a RunConfig,
// runs the matching verification suite, and emits the report as JSON or text.
// Exit codes: 0 all checks pass, 1 at least one check failed or is unknown,
// 2 usage/configuration error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tetra/tetra.hpp"

namespace {

tetra::Scalar parseComplex(const std::string& text) {
  std::istringstream is(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(is >> re)) throw CLI::ValidationError("expected 're,im', got '" + text + "'");
  if (is >> comma) {
    if (comma != ',' || !(is >> im)) {
      throw CLI::ValidationError("expected 're,im', got '" + text + "'");
    }
  }
  std::string rest;
  if (is >> rest) throw CLI::ValidationError("trailing input in complex value '" + text + "'");
  return tetra::Scalar{re, im};
}

tetra::TetrablockPoint parsePoint(const std::string& text) {
  std::vector<tetra::Scalar> coords;
  std::string piece;
  std::istringstream is(text);
  while (std::getline(is, piece, ';')) coords.push_back(parseComplex(piece));
  if (coords.size() != 3) {
    throw CLI::ValidationError("expected 're,im;re,im;re,im', got '" + text + "'");
  }
  return tetra::TetrablockPoint{coords[0], coords[1], coords[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for explicit tetrablock-isometric dilations"};
  app.require_subcommand(1);

  tetra::cli::RunConfig cfg;
  std::string alphaText = "0.25,0";
  std::string pointText;

  auto addCommon = [&](CLI::App* sub, bool wantsPoint) {
    sub->add_option("--alpha", alphaText, "family parameter as 're,im'")
        ->capture_default_str();
    if (wantsPoint) {
      sub->add_option("--point", pointText, "candidate point as 're,im;re,im;re,im'");
    }
    sub->add_option("--depth", cfg.windowDepth, "probe window depth")
        ->check(CLI::Range(2, 64))
        ->capture_default_str();
    sub->add_option("--norm-depth", cfg.normDepthMax, "maximum depth for norm estimation")
        ->check(CLI::Range(4, 4096))
        ->capture_default_str();
    sub->add_option("--tol", cfg.tolOverride, "tolerance override for every check");
    sub->add_option("--grid", cfg.gridSize, "circle grid size for sup-norm brackets")
        ->check(CLI::Range(8, 1 << 20))
        ->capture_default_str();
    sub->add_option("--seed", cfg.seed, "seed echoed into the report")->capture_default_str();
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    sub->add_option("--out", cfg.outPath, "write the report to this file instead of stdout");
    return sub;
  };

  const char* const subNames[] = {"verify-pal",         "verify-adjoint", "verify-toeplitz-form",
                                  "xi-check",           "xi-search",      "membership"};
  const char* const subDescs[] = {
      "verify the concrete commuting triple and its explicit dilation",
      "verify the adjoint-side defect data and dilation",
      "verify the block-Toeplitz route and its agreement with the direct one",
      "evaluate the coefficient condition set for the family's coefficient",
      "search for a coefficient satisfying the condition set",
      "decide membership of a point in the closed domain / its boundary"};
  for (int k = 0; k < 6; ++k) {
    addCommon(app.add_subcommand(subNames[k], subDescs[k]), std::string(subNames[k]) == "membership");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.alpha = parseComplex(alphaText);
    if (!pointText.empty()) cfg.point = parsePoint(pointText);
    tetra::require(tetra::isFiniteScalar(cfg.alpha), "alpha must be finite");
    if (cfg.tolOverride) tetra::require(*cfg.tolOverride > 0.0, "tol must be positive");

    tetra::cli::Report report = tetra::cli::runSuite(cfg);
    const std::string rendered = tetra::cli::emitReport(report);
    if (cfg.outPath) {
      std::ofstream out(*cfg.outPath, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot open output file: " + *cfg.outPath);
      out << rendered;
    } else {
      std::cout << rendered;
    }
    return tetra::cli::exitCodeFor(report);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
