#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "vulpath/nn/models.hpp"

namespace vulpath::baselines {

struct EdgeMaskConfig {
  double lambda = 0.05;
  int steps = 200;
  int top_k = 10;
  double lr = 0.01;
  std::uint64_t seed = 42;
};

struct MaskedEdge {
  frontend::CpgEdge edge;
  double mask = 0;
};

struct EdgeMaskResult {
  std::set<int> lines;            // at most top_k lines
  std::vector<MaskedEdge> edges;  // every DDG/CDG edge, descending mask
  double original_probability = 0;
  double masked_probability = 0;
};

/// Adjacency with soft dependence edges: a node pair joined by AST or CFG
/// edges keeps weight 1; otherwise its weight is 1 - prod(1 - m_e) over the
/// DDG/CDG edges on the pair. Returned by the explainer for inspection.
nn::Matrix masked_adjacency(const frontend::CodePropertyGraph& cpg, const std::vector<double>& mask);

struct MaskObjective {
  double loss = 0;  // cross entropy against `target` plus lambda * sum(mask)
  double probability = 0;
  std::vector<double> gradient;
};

/// Objective and its exact gradient with respect to the mask.
MaskObjective edge_mask_objective(const frontend::CodePropertyGraph& cpg, const nn::Matrix& features,
                                  const nn::DetectorModel& detector, const std::vector<double>& mask, double target,
                                  double lambda);

/// Learns a mask over DDG/CDG edges that keeps the detector's prediction
/// (cross entropy against the original probability) under an L1 penalty,
/// with projected Adam steps. Lines are collected from edges in descending
/// mask order until `top_k` lines are gathered.
EdgeMaskResult edge_mask_explain(const frontend::CodePropertyGraph& cpg, const nn::Matrix& features,
                                 const nn::DetectorModel& detector, const EdgeMaskConfig& config = {});

}  // namespace vulpath::baselines
