#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vcam/executor.hpp"
#include "vcam/geometry.hpp"
#include "vcam/renderer.hpp"

namespace vcam {

/// 10·log10(255² / MSE) over all channels; +infinity when the frames match.
double psnr(const Frame& a, const Frame& b);

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, K1 0.01, K2 0.03, L 255)
/// over the valid region, averaged over the three channels.
double ssim(const Frame& a, const Frame& b);

struct TsedResult {
    std::vector<double> pair_means;          // symmetric SED per adjacent pair
    std::vector<double> pair_forward_means;  // one-directional variant
    double mean = 0.0;
    double forward_mean = 0.0;
};

/// Epipolar distance of each adjacent pair's correspondences under the exact
/// F of their cameras. `correspondences[i]` relates frames i and i+1.
TsedResult tsed(std::span<const Frame> frames, std::span<const Camera> cameras,
                std::span<const MatchSet> correspondences);

struct Disagreement {
    double mean = 0.0;  // mean |ΔRGB| per channel, 8-bit units
    double max = 0.0;
    std::size_t samples = 0;  // cells or patches contributing
    bool no_overlap = true;
};

/// Over patches hallucinated by two or more different passes: mean pairwise
/// color difference per patch, averaged over patches.
Disagreement cross_pass_disagreement(const ExecutionResult& result);

struct AdjacentDisagreement {
    Disagreement all;           // shared patches with a hallucinated side
    Disagreement shared_anchor; // patches both frames take from one shared anchor
    std::size_t pairs = 0;      // adjacent pairs from different passes
};

/// Adjacent target frames generated by different passes, compared on the
/// patches they both show.
AdjacentDisagreement adjacent_frame_disagreement(const ExecutionResult& result, const SamplingPlan& plan);

struct RevisitOptions {
    bool anchors_only = false;
    /// Only patches both frames copied from anchors made by other passes.
    bool bank_pinned_only = false;
    double camera_tolerance = 1e-9;
};

/// Frames with coinciding cameras (descriptor distance and intrinsics within
/// tolerance) compared on the patches they both show.
Disagreement revisit_disagreement(const ExecutionResult& result, const SamplingPlan& plan,
                                  const RevisitOptions& options = {});

struct MetricReport {
    std::vector<double> psnr;
    std::vector<double> ssim;
    std::vector<double> tsed;  // per adjacent pair
    std::optional<double> psnr_mean;
    std::optional<double> ssim_mean;
    std::optional<double> tsed_mean;
    std::optional<double> disagreement;
    // Neural metrics are not computed here; values from external tools may be merged in.
    std::optional<double> lpips;
    std::optional<double> motion_smoothness;

    bool operator==(const MetricReport&) const = default;
};

/// PSNR and SSIM per frame pair plus their means.
MetricReport evaluate_frames(std::span<const Frame> predicted, std::span<const Frame> reference);

}  // namespace vcam
