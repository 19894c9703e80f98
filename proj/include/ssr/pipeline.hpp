#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssr/lzeta.hpp"

namespace ssr {

// Explicit tower replacing the catalog search.
struct FieldTower {
  int f = 1;
  std::optional<std::vector<std::int64_t>> residue_modulus;
  std::vector<TowerStep> steps;
};

struct PipelineOptions {
  std::optional<std::int64_t> precision;  // pi-adic digits; default 50 e
  CatalogBounds bounds;
  std::optional<FieldTower> tower;
  std::optional<std::uint64_t> perturb_seed;  // replace charts by equivalent ones before normalizing
  std::optional<std::uint64_t> twist_seed;    // multiply each varpi_v by a unit
};

// A catalog field that was tried and rejected because n does not divide some N_v.
struct RejectedField {
  std::string field;
  std::vector<SemistableFailure> failures;
};

struct PipelineResult {
  SuperellipticCurve input;
  IntegralModel model;
  int genus = 0;
  std::vector<RejectedField> rejected;
  LFieldPtr L;
  std::string field;
  std::shared_ptr<GaloisGroup> G;
  RamificationFiltration filtration;
  MarkedTree tree;
  TreeGaloisAction action;
  SpecialFiberY Y;
  FiberGalois fg;
  InertialCurve Z;
  LFactorResult lfactor;
  ConductorResult conductor;
  std::vector<CountCheck> counts;
};

PipelineResult run_pipeline(const SuperellipticCurve& C, const PipelineOptions& opt = {});

}  // namespace ssr
