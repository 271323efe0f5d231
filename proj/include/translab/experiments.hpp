#pragma once

#include <string>
#include <utility>
#include <vector>

#include "translab/grid.hpp"

namespace translab {

struct ExperimentReport {
    std::string id;
    std::string inputs_json;
    std::string metrics_json;
    bool verdict = false;
    bool applicable = true;
    std::string verdict_detail;
    std::vector<std::pair<std::string, std::string>> csv_tables;  // name -> csv body
    std::string to_json() const;
};

// Solves/samples the three classification types (grim reaper slab, tilted
// grim reaper slab, bowl entire), records residual orders and wall-tilt
// decay. Config keys: nx, ny, C, b, offsets, wall_inset.
ExperimentReport classification_gallery(const std::string& config_json);

// Ramped Dirichlet scans over an M-sequence on a SLAB (periodic y) or a
// DISK realized as an annulus with an inner reference ring. Config keys:
// domain ("SLAB"|"DISK"), rho, M_sequence, nx, C, warm_start.
ExperimentReport blowup_scan(const std::string& config_json);

// Tilt table at wall offsets for a slab solution (or "flat" -> not
// applicable). Config keys: kind, b, C, wall ("left"|"right"), offsets, nx.
ExperimentReport asymptote_check(const std::string& config_json);

// Shared config plumbing: parse + reject unknown keys.
void reject_unknown_keys(const std::string& config_json, const std::vector<std::string>& allowed,
                         const std::string& context);

}  // namespace translab
