#pragma once

#include "netupd/netmodel.hpp"
#include "netupd/pairinfo.hpp"

namespace netupd {

/// Computes the per-pair round list: updated-flow edges are scanned nearest
/// the terminal first and activated whenever insertion keeps the active edge
/// set acyclic; a round closes by retiring old-flow edges whose tail updated.
/// Old-only nodes are scheduled one round after the in-both node heading
/// their segment updates (their rules must outlive any flow reaching them).
std::vector<std::vector<int>> greedy_pair(const Network& network, const FlowPair& pair);

/// Greedy over all pairs independently; start offsets are zero and the
/// horizon is the longest per-pair round count.
UpdateSchedule greedy_all(const Instance& instance);

}  // namespace netupd
