#pragma once

#include <string>

namespace agrisim {

// One evaluation episode's scorecard.
struct EpisodeMetrics {
    double energy_j = 0.0;
    double recognition_pct = 0.0;
    double collection_pct = 0.0;
    double completion_s = 0.0;
    double inference_ms = 0.0;
    int episode = 0;
    int agent_count = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
};

}  // namespace agrisim
