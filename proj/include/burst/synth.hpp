#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "burst/detect.hpp"
#include "burst/types.hpp"

namespace burst::synth {

// SplitMix64 (Steele et al.), chosen so seeds reproduce anywhere from the
// published constants alone. uniform01 maps the top 53 bits into (0, 1].
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01();       // (0, 1]
    double exponential();     // Exp(1) via inversion
    std::uint64_t poisson(double mean);  // counts Exp(1) arrivals within `mean`

  private:
    std::uint64_t state_;
};

enum class BurstKind { PulseExo, BumpEndo };

std::string to_string(BurstKind kind);
BurstKind burst_kind_from_string(const std::string& text);

// PulseExo: spike at `start` decaying exponentially (time constant 1.5
// bins) across `width` bins. BumpEndo: symmetric triangle over `width`
// (at least 10) bins. `height` is the peak above the baseline.
struct BurstSpec {
    BurstKind kind = BurstKind::PulseExo;
    std::size_t start = 0;
    std::size_t width = 1;
    double height = 1.0;
};

struct ScaleStep {
    std::size_t start = 0;
    double scale = 1.0;
};

struct SynthSpec {
    std::string keyword;
    std::size_t n_bins = 0;
    double baseline_mean = 1.0;
    std::vector<ScaleStep> noise_scale;  // piecewise-constant mean multiplier
    std::vector<BurstSpec> bursts;       // disjoint, in range
    std::uint64_t seed = 0;

    void validate() const;
    double scale_at(std::size_t bin) const;
};

struct TruthInterval {
    BurstKind kind = BurstKind::PulseExo;
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive
    double height = 0.0;
};

struct Generated {
    FrequencySeries series;  // raw counts plus injected shapes
    std::vector<TruthInterval> truth;
};

// Deterministic for a given spec: baseline bins are
// Poisson(baseline_mean * scale(t)), burst shapes are added on top.
Generated generate(const SynthSpec& spec);

struct OraclePath {
    double cost = 0.0;
    std::vector<int> levels;
};

// Exact minimum over every (top_level+1)^n level path, using the same cost
// model as detect(). Search spaces beyond 1e8 paths are rejected.
OraclePath oracle_viterbi(const std::vector<double>& values, double base_rate,
                          const DetectorParams& params, int top_level);
OraclePath oracle_viterbi(const FrequencySeries& series, const DetectorParams& params,
                          int top_level);

// Mann-Whitney AUC: fraction of (endo, exo) pairs with the endogenous fluct
// strictly smaller; ties count one half.
double oracle_auc(const std::vector<double>& endo_flucts, const std::vector<double>& exo_flucts);

struct SynthCorpus {
    std::uint64_t seed = 0;
    std::vector<SynthSpec> keywords;  // seeds resolved
};

// JSON corpus file: {"seed": N, "keywords": [{keyword, n_bins,
// baseline_mean, noise_scale?, bursts, seed?}, ...]}. Keywords without an
// explicit seed get one drawn from a SplitMix64 stream over the corpus seed.
SynthCorpus load_synth_corpus(const std::filesystem::path& path);

}  // namespace burst::synth
