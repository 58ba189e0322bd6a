#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sisde/coefficients.hpp"
#include "sisde/errors.hpp"
#include "sisde/transition_model.hpp"

namespace sisde::cli {

/// Every problem found in a config, one message per entry.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> messages);

  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

enum class ModelKind { greenhalgh, custom };
enum class DrivingKind { square_root, general };
enum class Scheme { triangular, full2d };
enum class FpMode { master, fokker };
enum class CompareKind { master_vs_jump, n_marginal };

/// a(y, x) = a0 + ay y + ax x, alpha = alpha0 + alpha1 y, beta = beta0 + beta1 y.
struct CustomModel {
  double a0 = 0.0;
  double ay = 0.0;
  double ax = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double scale = 1.0;
  DrivingKind driving = DrivingKind::square_root;
  double m0 = 0.0;  ///< general driving drift m0 + m1 y
  double m1 = 0.0;
  double sigma0 = 0.0;  ///< general driving volatility sigma0 + sigma1 y
  double sigma1 = 0.0;
};

struct SimSection {
  double horizon = 1.0;
  int level = 8;
  std::vector<int> levels{6, 7, 8, 9, 10};
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  double rho = 0.0;
  bool absorb = true;
  double dt = 1e-3;
  Scheme scheme = Scheme::triangular;
};

struct ValidateSection {
  std::size_t samples = 10000;
  DomainBox box{1.0, 200.0, 0.0, 200.0, 0.0};
};

struct FpSection {
  FpMode mode = FpMode::master;
  std::size_t n1 = 160;
  std::size_t n2 = 160;
  double h = 1.0;
  double dt = 1e-3;
  std::size_t snapshots = 1;
};

struct CompareSection {
  CompareKind kind = CompareKind::n_marginal;
  double threshold = 0.05;
};

struct OutputSection {
  std::string dir = ".";
  std::size_t trajectories = 10;
  std::size_t bins = 20;
};

struct ScenarioConfig {
  ModelKind kind = ModelKind::greenhalgh;
  GreenhalghParams greenhalgh{0.01, 0.05, ContactRate{ContactFamily::constant, 0.2, 0.0, 1.0}};
  DeclaredConstants declared;
  CustomModel custom;
  double x0 = 30.0;
  double y0 = 100.0;
  SimSection sim;
  ValidateSection validate;
  FpSection fp;
  CompareSection compare;
  OutputSection output;

  /// Effective value of every key as text, defaults included.
  std::map<std::string, std::string> values;
};

/// Parses the flat "key = value" format: one entry per line, '#' starts a
/// comment, blank lines are ignored. Throws ConfigError listing every unknown
/// key, duplicate, type mismatch and range violation.
ScenarioConfig parse_config(std::string_view text);

/// Applies a seed override and keeps the echoed values in sync.
void override_seed(ScenarioConfig& config, std::uint64_t seed);

/// Config text that parses back to the same effective values. output.dir is
/// left out so a rerun can target another directory.
std::string manifest_text(const ScenarioConfig& config, std::string_view command);

/// Documented keys with their defaults, in manifest order.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace sisde::cli
