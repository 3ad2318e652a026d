#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nterm/lattice.hpp"
#include "nterm/sequence.hpp"

namespace nterm::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kDomainError = 3, kVerificationFailure = 4 };

/// Raised for malformed options or descriptors; maps to exit code 2.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message) : Error(message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct JobConfig {
  std::string subcommand;
  std::string sequence;  ///< --seq descriptor
  std::string family;    ///< --family descriptor
  double scale = 1.0;
  double p = 2.0;
  double q = 2.0;
  bool have_p = false;
  bool have_q = false;
  std::vector<Index> n;
  std::string grid;  ///< "lo:hi[:per_decade]" in decimal exponents
  double tol = 1e-10;
  std::string format = "json";
  std::uint64_t seed = 7;
  // constant
  std::string tag;
  std::vector<double> s;
  std::vector<int> d;
  double beta = 0.0;
  double c = 1.0;
  // verify
  Index big_m = 8;
  Index samples = 2000;
  int restarts = 64;
  bool random_prefix = false;
  bool inject_perturbation = false;
  // stream
  Index count = 20;
  // ratio
  bool terms = false;
};

/// p or q: a positive decimal or "inf".
double parse_exponent(const std::string& text, const std::string& field);

/// geometric:0.5 | geometric:ratio=0.5,c=1 | powerlog:s=1,b=0,c=1 |
/// finite:values=3/2/1,tail=1 | mixed:... | energy:... (rearranged lattice)
SourcePtr parse_sequence(const std::string& descriptor);

/// mixed:s=1,r=inf,d=2 | energy:s=2,d=2
WeightFamily parse_family(const std::string& descriptor);

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nterm::cli
