#include "aquanet/schemes.hpp"

#include <cmath>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::LaxWendroff: return "lw";
    case Scheme::BackwardEuler: return "be";
    case Scheme::CrankNicolson: return "cn";
    case Scheme::Characteristics: return "moc";
    case Scheme::Lagrangian: return "ltd";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (auto s : {Scheme::LaxWendroff, Scheme::BackwardEuler, Scheme::CrankNicolson, Scheme::Characteristics,
                 Scheme::Lagrangian}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

LwWeights lw_weights(double courant) {
  if (!(courant >= 0.0 && courant <= 1.0)) {
    throw Error(ErrorCategory::Cfl, "Courant number " + detail::format_double(courant) +
                                        " is outside [0, 1]; the explicit scheme is unstable");
  }
  const double l = courant;
  return {0.5 * l * (1.0 + l), 1.0 - l * l, -0.5 * l * (1.0 - l)};
}

void StateSpaceSystem::add_nonlinear(std::span<const double> x1, std::span<const double> x2,
                                     std::span<double> rhs) const {
  for (const auto& m : mutual) rhs[m.row] += m.coefficient * x1[m.index] * x2[m.index];
  if (!bulk.empty()) {
    const std::size_t s = index_of(species);
    for (const auto& b : bulk) rhs[b.row] += b.coefficient * bulk_model_rate(*bulk_model, x1[b.index], x2[b.index])[s];
  }
}

namespace {

double link_flow(const HydraulicStep& step, ElementRef link) {
  switch (link.kind) {
    case ElementKind::Pipe: return step.pipe_flow[link.index];
    case ElementKind::Pump: return step.pump_flow[link.index];
    case ElementKind::Valve: return step.valve_flow[link.index];
    default: return 0.0;
  }
}

// State index that feeds `node` through `link`: the pipe segment touching the
// node, or the pump/valve state.
std::size_t link_end_state(const StepContext& ctx, ElementRef link, ElementRef node) {
  if (link.kind != ElementKind::Pipe) return ctx.layout->index_of(link);
  const bool node_is_from = ctx.net->link_from(link) == node;
  const bool first_at_from = ctx.orientation[link.index] >= 0;
  return node_is_from == first_at_from ? ctx.layout->first_segment(link.index) : ctx.layout->last_segment(link.index);
}

struct NodeFlows {
  double outflow = 0.0;
  std::vector<std::pair<std::size_t, double>> inflow;  // (state index, |q|)
};

NodeFlows node_flows(const StepContext& ctx, ElementRef node) {
  NodeFlows f;
  for (const auto& link : ctx.net->incident_links(node)) {
    const double q = link_flow(*ctx.hydraulics, link);
    if (q == 0.0) continue;
    const bool into = (q > 0.0) == (ctx.net->link_to(link) == node);
    if (into) {
      f.inflow.emplace_back(link_end_state(ctx, link, node), std::abs(q));
    } else {
      f.outflow += std::abs(q);
    }
  }
  return f;
}

// Upstream and downstream node state indices of a pipe in segment order.
std::pair<std::size_t, std::size_t> pipe_ends(const StepContext& ctx, std::size_t pipe) {
  const ElementRef link{ElementKind::Pipe, pipe};
  const std::size_t from = ctx.layout->index_of(ctx.net->link_from(link));
  const std::size_t to = ctx.layout->index_of(ctx.net->link_to(link));
  return ctx.orientation[pipe] >= 0 ? std::pair{from, to} : std::pair{to, from};
}

double linear_pipe_decay(const StepContext& ctx, std::size_t pipe, Species species) {
  if (species == Species::Reactant) return 0.0;
  const double k = ctx.decay->pipe[pipe];
  return ctx.bulk_model ? k - ctx.bulk_model->params.kb : k;
}

double linear_tank_decay(const StepContext& ctx, std::size_t tank, Species species) {
  if (species == Species::Reactant || ctx.bulk_model) return 0.0;
  return ctx.decay->tank[tank];
}

void begin(const StepContext& ctx, Scheme scheme, Species species, StateSpaceSystem& out) {
  const std::size_t n = ctx.layout->size();
  out.scheme = scheme;
  out.species = species;
  out.A.reset(n, n);
  out.B.reset(n, ctx.net->boosters().size());
  out.mutual.clear();
  out.bulk.clear();
  out.bulk_model = ctx.bulk_model;
  out.stagnant_junctions.clear();
  const bool identity = scheme == Scheme::LaxWendroff || scheme == Scheme::Characteristics;
  out.e_identity = identity;
  if (identity) {
    if (out.E.rows() != n || !out.E.is_identity()) out.E = CsrMatrix::identity(n);
  } else {
    out.E.reset(n, n);
  }
}

// Rows for reservoirs, junctions, tanks and pumps (everything before the
// pipe block). E rows are identity for these.
void node_rows(const StepContext& ctx, Species species, StateSpaceSystem& out) {
  const auto& L = *ctx.layout;
  const bool implicit = !out.e_identity;

  for (std::size_t i = 0; i < ctx.net->reservoirs().size(); ++i) {
    out.A.add(L.reservoir(i), L.reservoir(i), 1.0);
    if (implicit) out.E.add(L.reservoir(i), L.reservoir(i), 1.0);
  }
  for (std::size_t j = 0; j < ctx.net->junctions().size(); ++j) {
    const std::size_t row = L.junction(j);
    const auto jr = junction_row(ctx, j);
    if (jr.stagnant) {
      out.A.add(row, row, 1.0);
      out.stagnant_junctions.push_back(j);
    }
    for (const auto& [col, w] : jr.inflow) out.A.add(row, col, w);
    for (const auto& [b, w] : jr.booster) out.B.add(row, b, w);
    if (implicit) out.E.add(row, row, 1.0);
  }
  for (std::size_t k = 0; k < ctx.net->tanks().size(); ++k) {
    const std::size_t row = L.tank(k);
    const auto tr = tank_row(ctx, k, species);
    out.A.add(row, row, tr.self);
    for (const auto& [col, w] : tr.inflow) out.A.add(row, col, w);
    for (const auto& [b, w] : tr.booster) out.B.add(row, b, w);
    if (tr.mutual != 0.0) out.mutual.push_back({row, tr.mutual, row});
    if (ctx.bulk_model) out.bulk.push_back({row, ctx.dt * tr.volume_ratio, row});
    if (implicit) out.E.add(row, row, 1.0);
  }
  for (std::size_t m = 0; m < ctx.net->pumps().size(); ++m) {
    const ElementRef link{ElementKind::Pump, m};
    const ElementRef up = ctx.hydraulics->pump_flow[m] >= 0.0 ? ctx.net->link_from(link) : ctx.net->link_to(link);
    out.A.add(L.pump(m), L.index_of(up), 1.0);
    if (implicit) out.E.add(L.pump(m), L.pump(m), 1.0);
  }
}

void valve_rows(const StepContext& ctx, StateSpaceSystem& out) {
  const auto& L = *ctx.layout;
  for (std::size_t v = 0; v < ctx.net->valves().size(); ++v) {
    const ElementRef link{ElementKind::Valve, v};
    const ElementRef up = ctx.hydraulics->valve_flow[v] >= 0.0 ? ctx.net->link_from(link) : ctx.net->link_to(link);
    out.A.add(L.valve(v), L.index_of(up), 1.0);
    if (!out.e_identity) out.E.add(L.valve(v), L.valve(v), 1.0);
  }
  out.A.finish();
  out.B.finish();
  out.E.finish();
}

void pipe_reaction_terms(const StepContext& ctx, std::size_t row, StateSpaceSystem& out, bool mutual_in_f) {
  if (mutual_in_f && ctx.kr != 0.0) out.mutual.push_back({row, -ctx.kr * ctx.dt, row});
  if (ctx.bulk_model) out.bulk.push_back({row, ctx.dt, row});
}

// Tridiagonal pipe stencils of the three Eulerian schemes. The first and
// last segments couple to the upstream and downstream node states.
void eulerian_pipe_rows(const StepContext& ctx, Species species, Scheme scheme, StateSpaceSystem& out) {
  const auto& L = *ctx.layout;
  for (std::size_t p = 0; p < L.pipe_count(); ++p) {
    const auto [up, down] = pipe_ends(ctx, p);
    const double lam = ctx.courant[p];
    const double kp = linear_pipe_decay(ctx, p, species);
    const std::size_t n = L.segments(p);
    LwWeights w;
    if (scheme == Scheme::LaxWendroff) w = lw_weights(lam);
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t row = L.segment(p, s);
      const std::size_t prev = s == 0 ? up : row - 1;
      const std::size_t next = s + 1 == n ? down : row + 1;
      switch (scheme) {
        case Scheme::LaxWendroff:
          out.A.add(row, prev, w.lower);
          out.A.add(row, row, w.center - kp * ctx.dt);
          out.A.add(row, next, w.upper);
          break;
        case Scheme::BackwardEuler:
          out.E.add(row, prev, -0.5 * lam);
          out.E.add(row, row, 1.0);
          out.E.add(row, next, 0.5 * lam);
          out.A.add(row, row, 1.0 - kp * ctx.dt);
          break;
        case Scheme::CrankNicolson:
          out.E.add(row, prev, -0.25 * lam);
          out.E.add(row, row, 1.0);
          out.E.add(row, next, 0.25 * lam);
          out.A.add(row, prev, 0.25 * lam);
          out.A.add(row, row, 1.0 - kp * ctx.dt);
          out.A.add(row, next, -0.25 * lam);
          break;
        default: break;
      }
      pipe_reaction_terms(ctx, row, out, true);
    }
  }
}

}  // namespace

JunctionRow junction_row(const StepContext& ctx, std::size_t junction) {
  const ElementRef node{ElementKind::Junction, junction};
  JunctionRow row;
  const auto flows = node_flows(ctx, node);
  const double denom = ctx.hydraulics->junction_demand[junction] + flows.outflow;
  if (denom <= 0.0) {
    row.stagnant = true;
    return row;
  }
  for (const auto& [col, q] : flows.inflow) row.inflow.emplace_back(col, q / denom);
  for (std::size_t b : ctx.net->boosters_at(node)) row.booster.emplace_back(b, ctx.hydraulics->booster_flow[b] / denom);
  return row;
}

TankRow tank_row(const StepContext& ctx, std::size_t tank, Species species) {
  const ElementRef node{ElementKind::Tank, tank};
  const auto& step = *ctx.hydraulics;
  const double v_now = tank_volume_at(*ctx.net, step, tank, ctx.t);
  const double v_next = tank_volume_at(*ctx.net, step, tank, ctx.t + ctx.dt);
  const std::string& id = ctx.net->tanks()[tank].id;
  if (!(v_next > 0.0)) {
    throw Error(ErrorCategory::MassBalance,
                "tank '" + id + "' volume at t = " + detail::format_double(ctx.t + ctx.dt) + " s is not positive", id);
  }
  const auto flows = node_flows(ctx, node);
  const double q_out = step.tank_demand[tank] + flows.outflow;
  const double k = linear_tank_decay(ctx, tank, species);

  TankRow row;
  row.self = ((1.0 - k * ctx.dt) * v_now - q_out * ctx.dt) / v_next;
  if (row.self < 0.0) {
    throw Error(ErrorCategory::MassBalance,
                "tank '" + id + "' drains more than its content in one quality step; reduce the time step", id);
  }
  for (const auto& [col, q] : flows.inflow) row.inflow.emplace_back(col, q * ctx.dt / v_next);
  for (std::size_t b : ctx.net->boosters_at(node)) row.booster.emplace_back(b, step.booster_flow[b] * ctx.dt / v_next);
  row.volume_ratio = v_now / v_next;
  row.mutual = ctx.kr == 0.0 ? 0.0 : -ctx.kr * ctx.dt * row.volume_ratio;
  return row;
}

void assemble_lw(const StepContext& ctx, Species species, StateSpaceSystem& out) {
  begin(ctx, Scheme::LaxWendroff, species, out);
  node_rows(ctx, species, out);
  eulerian_pipe_rows(ctx, species, Scheme::LaxWendroff, out);
  valve_rows(ctx, out);
}

void assemble_be(const StepContext& ctx, Species species, StateSpaceSystem& out) {
  begin(ctx, Scheme::BackwardEuler, species, out);
  node_rows(ctx, species, out);
  eulerian_pipe_rows(ctx, species, Scheme::BackwardEuler, out);
  valve_rows(ctx, out);
}

void assemble_cn(const StepContext& ctx, Species species, StateSpaceSystem& out) {
  begin(ctx, Scheme::CrankNicolson, species, out);
  node_rows(ctx, species, out);
  eulerian_pipe_rows(ctx, species, Scheme::CrankNicolson, out);
  valve_rows(ctx, out);
}

void assemble_moc(const StepContext& ctx, Species species, std::span<const double> x1, std::span<const double> x2,
                  StateSpaceSystem& out) {
  begin(ctx, Scheme::Characteristics, species, out);
  node_rows(ctx, species, out);
  const auto& L = *ctx.layout;
  const auto other = species == Species::Chlorine ? x2 : x1;
  for (std::size_t p = 0; p < L.pipe_count(); ++p) {
    const double lam = ctx.courant[p];
    if (lam > 1.0) {
      throw Error(ErrorCategory::Cfl,
                  "Courant number " + detail::format_double(lam) + " exceeds 1; characteristic interpolation invalid",
                  ctx.net->pipes()[p].id);
    }
    const double kp = linear_pipe_decay(ctx, p, species);
    const auto [up, down] = pipe_ends(ctx, p);
    (void)down;
    auto decay = [&](std::size_t idx) { return std::exp(-(kp + ctx.kr * other[idx]) * ctx.dt); };
    for (std::size_t s = 0; s < L.segments(p); ++s) {
      const std::size_t row = L.segment(p, s);
      if (s == 0 && lam > 0.0) {
        out.A.add(row, up, 1.0);  // first segment takes the upstream node value
      } else if (s == 0) {
        out.A.add(row, row, decay(row));  // stagnant: reaction only
      } else {
        out.A.add(row, row - 1, lam * decay(row - 1));
        out.A.add(row, row, (1.0 - lam) * decay(row));
      }
      pipe_reaction_terms(ctx, row, out, false);
    }
  }
  valve_rows(ctx, out);
}

void assemble(Scheme scheme, const StepContext& ctx, Species species, std::span<const double> x1,
              std::span<const double> x2, StateSpaceSystem& out) {
  switch (scheme) {
    case Scheme::LaxWendroff: assemble_lw(ctx, species, out); return;
    case Scheme::BackwardEuler: assemble_be(ctx, species, out); return;
    case Scheme::CrankNicolson: assemble_cn(ctx, species, out); return;
    case Scheme::Characteristics: assemble_moc(ctx, species, x1, x2, out); return;
    case Scheme::Lagrangian: break;
  }
  throw Error(ErrorCategory::Usage, "the Lagrangian oracle has no state-space form");
}

StateSpaceSystem assemble_lw(const StepContext& ctx, Species species) {
  StateSpaceSystem s;
  assemble_lw(ctx, species, s);
  return s;
}

StateSpaceSystem assemble_be(const StepContext& ctx, Species species) {
  StateSpaceSystem s;
  assemble_be(ctx, species, s);
  return s;
}

StateSpaceSystem assemble_cn(const StepContext& ctx, Species species) {
  StateSpaceSystem s;
  assemble_cn(ctx, species, s);
  return s;
}

StateSpaceSystem assemble_moc(const StepContext& ctx, Species species, std::span<const double> x1,
                              std::span<const double> x2) {
  StateSpaceSystem s;
  assemble_moc(ctx, species, x1, x2, s);
  return s;
}

}  // namespace aquanet
