#include <benchmark/benchmark.h>

#include <string>

#include "aquanet/analysis.hpp"
#include "aquanet/engine.hpp"
#include "aquanet/hydraulics.hpp"
#include "aquanet/network.hpp"
#include "aquanet/scenario.hpp"

namespace {

using namespace aquanet;

struct Net1 {
  Network net;
  HydraulicSchedule schedule;
  Scenario scenario;
};

const Net1& net1() {
  static const Net1 in = [] {
    const std::string dir = AQUANET_DATA_DIR;
    Network net(parse_network(read_text_file(dir + "/net1.net")));
    auto sched = load_hydraulics(read_text_file(dir + "/net1.hyd.csv"), net);
    auto sc = parse_scenario(read_text_file(dir + "/net1.scn"));
    return Net1{std::move(net), std::move(sched), std::move(sc)};
  }();
  return in;
}

// Two simulated hours of Net1; range(0) is the time step in seconds.
void run_scheme(benchmark::State& state, Scheme scheme) {
  const auto& in = net1();
  auto sc = in.scenario;
  sc.sim.scheme = scheme;
  sc.sim.dt = static_cast<double>(state.range(0));
  sc.sim.duration = 7200.0;
  for (auto _ : state) {
    auto r = run_simulation(in.net, in.schedule, sc);
    benchmark::DoNotOptimize(r);
  }
  state.counters["steps"] = 7200.0 / sc.sim.dt;
}

void BM_LaxWendroff(benchmark::State& s) { run_scheme(s, Scheme::LaxWendroff); }
void BM_Characteristics(benchmark::State& s) { run_scheme(s, Scheme::Characteristics); }
void BM_BackwardEuler(benchmark::State& s) { run_scheme(s, Scheme::BackwardEuler); }
void BM_CrankNicolson(benchmark::State& s) { run_scheme(s, Scheme::CrankNicolson); }
void BM_Lagrangian(benchmark::State& s) { run_scheme(s, Scheme::Lagrangian); }

}  // namespace

BENCHMARK(BM_LaxWendroff)->Arg(5)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Characteristics)->Arg(5)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BackwardEuler)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrankNicolson)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Lagrangian)->Arg(5)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
