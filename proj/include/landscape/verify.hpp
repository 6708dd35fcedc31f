#pragma once

#include <string>
#include <vector>

#include "landscape/spurious.hpp"

namespace landscape {

struct LocalMinReport {
    double base_loss = 0.0;
    double gradient_norm = 0.0;
    double radius = 0.0;
    int samples = 0;
    double min_gap = 0.0;  // min over samples of loss(perturbed) - loss(base)
    double mean_gap = 0.0;
    int regime_violations = 0;
    bool radius_vacuous = false;
    bool passed = false; // gradient ~ 0, no violations, no gap below -1e-12
};

// Certifies local minimality empirically: perturbs within the certified
// radius and checks the loss never drops. Throws TargetDegenerateError when
// the target is exactly fittable by the variant's model class (then the
// point is a global minimum and there is nothing spurious to certify).
LocalMinReport check_local_min(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                               const Target& target, const LossSpec& spec, int samples,
                               std::uint64_t seed, int threads = 1);

// Stacks a width-1 chain and an independent residual network side by side;
// the residual's output layer is scaled by s, so the forward value is
// chain(x) + s * residual(x).
std::pair<Architecture, Parameters> compose_parallel(const SpuriousConstruction& chain,
                                                     const Architecture& residual_arch,
                                                     const Parameters& residual, double s);

struct EscapeCertificate {
    Parameters params;
    double escape_loss = 0.0;
    double spurious_loss = 0.0;
    double gap = 0.0; // spurious_loss - escape_loss, strictly positive
    std::string method; // "parallel_split" or "random_restart"
    int restarts_used = 0;
};

// Finds parameters with strictly smaller loss than the construction's
// realization: first by splitting off a width-1 chain and training a residual
// against the loss gradient, then polishing; random multistart descent runs
// as fallback. Throws SearchError when no strict improvement is found.
EscapeCertificate find_escape(const SpuriousConstruction& construction, const FiniteMeasure& mu,
                              const Target& target, const LossSpec& spec, int restarts,
                              std::uint64_t seed, int threads = 1);

// Estimated squared Euclidean distance from the target vector y to the
// closure of the set of prediction vectors the architecture can realize on
// the support.
double image_distance_sq(const Architecture& arch, const FiniteMeasure& mu,
                         const std::vector<double>& y, int restarts, std::uint64_t seed,
                         int threads = 1, std::vector<double>* best_predictions = nullptr);

struct DirectionGap {
    std::vector<double> direction;
    double distance_sq = 0.0;
};

struct ExpressivenessReport {
    double max_distance_sq = 0.0;
    std::vector<DirectionGap> directions;
};

// Max over random unit targets of the squared distance to the image; < 1
// exhibits the improved expressiveness bound (1 is what constants achieve).
ExpressivenessReport expressiveness_gap(const Architecture& arch, const FiniteMeasure& mu,
                                        int n_directions, int restarts, std::uint64_t seed,
                                        int threads = 1);

} // namespace landscape
