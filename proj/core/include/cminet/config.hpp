#pragma once

#include "cminet/cclasso.hpp"
#include "cminet/cmimn.hpp"
#include "cminet/consensus.hpp"
#include "cminet/methods.hpp"
#include "cminet/sparcc.hpp"
#include "cminet/table.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cminet {

/// Input representation for the pearson, spearman and bicor estimators.
enum class CorrelationInput { clr, proportions, counts };

struct CorrelationParams {
  CorrelationInput input = CorrelationInput::clr;
  double pseudo = 0.5;

  ParamRecord record() const;
};

/// Flat dotted-key configuration. Every key has a default; unknown keys and
/// malformed values raise ConfigError as soon as they are set.
class PipelineConfig {
 public:
  PipelineConfig();

  /// "key = value" lines; '#' starts a comment; "[section]" prefixes the
  /// following keys with "section.".
  static PipelineConfig parse(const std::string& text);
  /// A text config, or a run manifest (.json) whose "config" object is used.
  static PipelineConfig load(const std::filesystem::path& path);
  static std::vector<std::string> known_keys();

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }
  /// Every key with its effective value, one "key = value" line each.
  std::string echo() const;

  /// Cross-field checks: input present, at least two distinct methods,
  /// parameter ranges, and binarization rules that fit their methods.
  void validate() const;

  std::filesystem::path input_path() const;
  Orientation orientation() const;
  double min_prevalence() const;
  double min_total() const;
  std::vector<Method> methods() const;
  BinarizationRule rule(Method m) const;
  std::uint64_t seed() const;
  int jobs() const;
  std::filesystem::path output_dir() const;
  /// Consensus threshold used for network.svg; nullopt means floor(M / 2).
  std::optional<int> render_threshold() const;

  CorrelationParams correlation() const;
  SparccParams sparcc() const;
  SpiecEasiParams spieceasi(SpiecEasiMode mode) const;
  SpringParams spring() const;
  GcodaParams gcoda() const;
  CmimnParams cmimn() const;
  CclassoParams cclasso() const;

 private:
  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;

  std::map<std::string, std::string> entries_;
};

ParamRecord sparcc_record(const SparccParams& p);

}  // namespace cminet
