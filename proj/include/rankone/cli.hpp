#pragma once

// Command plumbing shared by the rankone tool and its tests: text specs for
// domains, grids and functions, sample CSV files, and JSON reports.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rankone/cauchy.hpp"
#include "rankone/classify.hpp"
#include "rankone/cones.hpp"
#include "rankone/entrywise.hpp"

namespace rankone::cli {

using json = nlohmann::ordered_json;

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr const char* kSeedEnv = "RANKONE_SEED";

// Seed from the environment override, else the built-in default.
std::uint64_t default_seed();

// "lo,hi" (open), "[lo,hi]", "(lo,hi]", "[lo,hi)", "disc:R",
// "annulus:r:R", "circle+interval:lo,hi".
Region parse_domain(std::string_view text);

// "lin:lo:hi:N", "geo:lo:hi:N", "circle:N", "list:p;q;...", joined by '+'.
std::vector<cplx> parse_grid(std::string_view text);

// Member syntax or "affine:a:b", "exp:b", "log:b", "abs", "max:t",
// "table:path".
CandidateFunction parse_function(std::string_view text, const Region& domain);

// Header row, then "x,value" or "re_x,im_x,re_v,im_v" rows.
std::vector<Sample> read_samples_csv(std::istream& in, const std::string& source);
std::vector<Sample> read_samples_file(const std::string& path);

json to_json(const HermitianMatrix& m);
HermitianMatrix matrix_from_json(const json& j);
json to_json(const WitnessCertificate& c);
WitnessCertificate certificate_from_json(const json& j);
json to_json(const PreserverVerdict& v);
json to_json(const ClassificationResult& r);
json to_json(const Rank2ExceptionProfile& p);
json to_json(const CauchyVerdict& v);
json to_json(const IndependenceResult& r);

struct CheckOptions {
  std::string fn;
  std::string domain;
  std::size_t n = 3;
  std::size_t out_k = 1;
  std::size_t trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  double psd_tol = ToleranceProfile{}.psd_tol;
  double rank_tol = ToleranceProfile{}.rank_tol;
};

struct ClassifyOptions {
  std::string samples;
  std::string mode = "real";  // real | complex | rank2
  std::string domain;         // empty: real line, or the plane for complex data
  double tol = kDefaultClassifyTol;
};

struct CauchyOptions {
  std::string samples;
  std::string equation;
  std::string domain;
  double tol = kDefaultCauchyTol;
};

struct IndependenceOptions {
  std::vector<std::string> members;
  std::string grid;
  double rel_tol = kIndependenceRelTol;
};

// Each returns {"inputs": ..., "verdict": ...}.
json run_check(const CheckOptions& o);
json run_classify(const ClassifyOptions& o);
json run_cauchy(const CauchyOptions& o);
json run_independence(const IndependenceOptions& o);

// Replays the command embedded in a report and rechecks its certificate.
json run_verify(const json& report);

json make_report(const std::string& command, const std::vector<std::string>& argv, const json& result,
                 std::optional<std::uint64_t> seed, double seconds);

// One-line human summary of a verdict.
std::string summarize(const std::string& command, const json& verdict);

}  // namespace rankone::cli
