#include "aquanet/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "aquanet/errors.hpp"
#include "text.hpp"

namespace aquanet {

std::string_view to_string(SpeciesMode mode) noexcept {
  switch (mode) {
    case SpeciesMode::Both: return "both";
    case SpeciesMode::Chlorine: return "chlorine";
    case SpeciesMode::Reactant: return "reactant";
  }
  return "unknown";
}

bool simulates(SpeciesMode mode, Species species) noexcept {
  if (mode == SpeciesMode::Both) return true;
  return (mode == SpeciesMode::Chlorine) == (species == Species::Chlorine);
}

namespace {

Species parse_species(const std::string& token, std::size_t line) {
  if (token == "1") return Species::Chlorine;
  if (token == "2") return Species::Reactant;
  detail::throw_parse(line, "species must be 1 (chlorine) or 2 (reactant), got '" + token + "'");
}

double nonnegative(const std::string& token, std::size_t line, const char* what) {
  const double v = detail::parse_double(token, line, what);
  if (v < 0.0) detail::throw_parse(line, std::string(what) + " must be nonnegative");
  return v;
}

void expect(const detail::Record& rec, std::size_t lo, std::size_t hi, const char* layout) {
  if (rec.fields.size() < lo || rec.fields.size() > hi) {
    detail::throw_parse(rec.line, "[" + rec.section + "] expects '" + layout + "'");
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const auto records = detail::read_sections(
      text, {"SOURCES", "INITIAL", "BOOSTERS-SCHEDULE", "SENSORS", "REACTIONS", "SIMULATION"}, "scenario");
  Scenario sc;
  bool rates_seen = false;
  for (const auto& rec : records) {
    const auto& f = rec.fields;
    if (rec.section == "SOURCES") {
      expect(rec, 3, 3, "node species conc_mg_L");
      sc.sources.push_back({f[0], parse_species(f[1], rec.line), nonnegative(f[2], rec.line, "concentration")});
    } else if (rec.section == "INITIAL") {
      expect(rec, 3, 3, "element species conc_mg_L");
      sc.initial.push_back({f[0], parse_species(f[1], rec.line), nonnegative(f[2], rec.line, "concentration")});
    } else if (rec.section == "BOOSTERS-SCHEDULE") {
      expect(rec, 3, 3, "time_s booster value_mg_L");
      sc.booster_schedule.push_back(
          {nonnegative(f[0], rec.line, "time"), f[1], nonnegative(f[2], rec.line, "booster value")});
    } else if (rec.section == "SENSORS") {
      expect(rec, 3, 4, "id element species [segment]");
      SensorSpec s{f[0], f[1], parse_species(f[2], rec.line), std::nullopt};
      if (f.size() == 4) {
        const auto seg = detail::parse_integer(f[3], rec.line, "segment");
        if (seg < 1) detail::throw_parse(rec.line, "sensor segment is 1-based");
        s.segment = static_cast<std::size_t>(seg);
      }
      sc.sensors.push_back(std::move(s));
    } else if (rec.section == "REACTIONS") {
      if (f[0] == "model") {
        expect(rec, 2, 2, "model <name>");
        const auto m = parse_bulk_model(f[1]);
        if (!m) detail::throw_parse(rec.line, "unknown bulk model '" + f[1] + "'");
        sc.bulk_model = *m;
        sc.hybrid = *m == BulkModel::SecondOrderFictitious;
      } else if (f[0] == "order") {
        expect(rec, 2, 2, "order <n>");
        sc.reactions.order = detail::parse_double(f[1], rec.line, "order");
      } else if (f[0] == "limit_mg_L") {
        expect(rec, 2, 2, "limit_mg_L <c>");
        sc.reactions.limit = nonnegative(f[1], rec.line, "limit_mg_L");
      } else {
        expect(rec, 4, 4, "kb_per_day kw_m_per_day kf_m_per_day kr_L_per_mg_day");
        if (rates_seen) detail::throw_parse(rec.line, "reaction rates given twice");
        rates_seen = true;
        const auto order = sc.reactions.order;
        const auto limit = sc.reactions.limit;
        try {
          sc.reactions = ReactionParams::from_field_units(
              detail::parse_double(f[0], rec.line, "kb"), detail::parse_double(f[1], rec.line, "kw"),
              detail::parse_double(f[2], rec.line, "kf"), detail::parse_double(f[3], rec.line, "kr"));
        } catch (const Error& e) {
          detail::throw_parse(rec.line, e.what());
        }
        sc.reactions.order = order;
        sc.reactions.limit = limit;
      }
    } else {  // SIMULATION
      expect(rec, 2, 64, "key value");
      const std::string& key = f[0];
      const std::string& value = f[1];
      if (key == "dt_s") {
        sc.sim.dt = detail::parse_double(value, rec.line, "dt_s");
        if (!(sc.sim.dt > 0.0)) detail::throw_parse(rec.line, "dt_s must be positive");
      } else if (key == "duration_s") {
        sc.sim.duration = detail::parse_double(value, rec.line, "duration_s");
        if (!(*sc.sim.duration > 0.0)) detail::throw_parse(rec.line, "duration_s must be positive");
      } else if (key == "scheme") {
        const auto s = parse_scheme(value);
        if (!s) detail::throw_parse(rec.line, "scheme must be one of lw, be, cn, moc, ltd");
        sc.sim.scheme = *s;
      } else if (key == "species") {
        if (value == "both") {
          sc.sim.species = SpeciesMode::Both;
        } else if (value == "chlorine") {
          sc.sim.species = SpeciesMode::Chlorine;
        } else if (value == "reactant") {
          sc.sim.species = SpeciesMode::Reactant;
        } else {
          detail::throw_parse(rec.line, "species must be both, chlorine or reactant");
        }
      } else if (key == "tau_adj_mg_L") {
        sc.sim.tau_adj = nonnegative(value, rec.line, "tau_adj_mg_L");
      } else if (key == "ltd_max_segments") {
        const auto n = detail::parse_integer(value, rec.line, "ltd_max_segments");
        if (n < 1) detail::throw_parse(rec.line, "ltd_max_segments must be at least 1");
        sc.sim.ltd_max_segments = static_cast<std::size_t>(n);
      } else if (key == "regrid_at") {
        for (std::size_t i = 1; i < f.size(); ++i) sc.sim.regrid_at.push_back(nonnegative(f[i], rec.line, "regrid_at"));
        std::sort(sc.sim.regrid_at.begin(), sc.sim.regrid_at.end());
      } else if (key == "clamp_negative") {
        sc.sim.clamp_negative = value == "true" || value == "1" || value == "yes";
      } else if (key == "record") {
        if (value == "hydraulic") {
          sc.sim.record = RecordMode::Hydraulic;
        } else if (value == "all") {
          sc.sim.record = RecordMode::All;
        } else {
          detail::throw_parse(rec.line, "record must be hydraulic or all");
        }
      } else {
        detail::throw_parse(rec.line, "unknown simulation key '" + key + "'");
      }
    }
  }
  if (!sc.hybrid) {
    BulkModelSpec spec{sc.bulk_model, sc.reactions};
    validate_bulk_model(spec);
  }
  return sc;
}

void validate_scenario(const Scenario& sc, const Network& net) {
  for (const auto& s : sc.sources) {
    const auto ref = net.find(s.node);
    if (!ref || ref->kind != ElementKind::Reservoir) {
      throw Error(ErrorCategory::Validation, "source '" + s.node + "' must name a reservoir", s.node);
    }
  }
  for (const auto& i : sc.initial) {
    const auto ref = net.find(i.element);
    if (!ref || ref->kind == ElementKind::Booster) {
      throw Error(ErrorCategory::Validation, "initial value for unknown element '" + i.element + "'", i.element);
    }
  }
  for (const auto& e : sc.booster_schedule) {
    const auto ref = net.find(e.booster);
    if (!ref || ref->kind != ElementKind::Booster) {
      throw Error(ErrorCategory::Validation, "schedule names unknown booster '" + e.booster + "'", e.booster);
    }
  }
  for (const auto& s : sc.sensors) {
    const auto ref = net.find(s.element);
    if (!ref || ref->kind == ElementKind::Booster) {
      throw Error(ErrorCategory::Validation, "sensor '" + s.id + "' watches unknown element '" + s.element + "'", s.id);
    }
    if (s.segment && ref->kind != ElementKind::Pipe) {
      throw Error(ErrorCategory::Validation, "sensor '" + s.id + "' gives a segment for a non-pipe element", s.id);
    }
  }
  if (!sc.hybrid && sc.sim.species == SpeciesMode::Both) {
    throw Error(ErrorCategory::Validation,
                "single-state bulk model '" + std::string(to_string(sc.bulk_model)) + "' requires a single-species run");
  }
}

std::vector<double> booster_values(const Scenario& sc, const Network& net, double t) {
  std::vector<double> u(net.boosters().size(), 0.0);
  std::vector<double> latest(net.boosters().size(), -1.0);
  for (const auto& e : sc.booster_schedule) {
    const auto ref = net.find(e.booster);
    if (!ref || ref->kind != ElementKind::Booster) continue;
    if (e.time <= t + 1e-9 && e.time >= latest[ref->index]) {
      latest[ref->index] = e.time;
      u[ref->index] = e.value;
    }
  }
  return u;
}

}  // namespace aquanet
