#pragma once

#include <map>
#include <memory>
#include <utility>

#include "fixture_gen.hpp"
#include "psd/deform.hpp"

namespace psd::testing {

// Every intermediate stage of the pipeline on one planted E_2 fixture. The
// 62500-element models take a moment to build, so each is built once.
struct PipelineRun {
  ModelSpec spec;
  ModelPtr model;
  DeformationContext ctx;
  A1Result a1;
  FirstOrder fo;
  Pi2Result pi2;
  SecondOrder det;
  FlatResult flat;
  UsnResult usn;
  CriterionReport report;

  PipelineRun(std::uint32_t p, std::int64_t alpha, std::int64_t beta)
      : spec(fixtures::second_order_fixture(p, alpha, beta)),
        model(GroupModel::build(spec)),
        ctx(make_context(model)),
        a1(build_a1(ctx)),
        fo(build_rho1(ctx, a1)),
        pi2(*solve_pi2(fo, ctx.b0)),
        det(normalize_det(pi2.solution, fo)),
        flat(normalize_flat(det, fo, ctx)),
        usn(check_usn(flat.solution, fo, ctx)),
        report(main_criterion(ctx)) {}
};

inline const PipelineRun& pipeline(std::int64_t alpha, std::int64_t beta) {
  static std::map<std::pair<std::int64_t, std::int64_t>, std::unique_ptr<PipelineRun>> cache;
  auto& slot = cache[{alpha, beta}];
  if (!slot) slot = std::make_unique<PipelineRun>(5, alpha, beta);
  return *slot;
}

}  // namespace psd::testing
