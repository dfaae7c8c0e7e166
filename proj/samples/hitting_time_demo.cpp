// Expected time to reach the optimum from a few starting points, for both
// heuristics on every built-in problem.
#include <cstdio>
#include <string>

#include "rshlab/rshlab.hpp"

int main() {
    using namespace rshlab;
    for (const auto &name : builtin_names()) {
        const ProblemSpec problem = builtin_problem(name);
        for (Algorithm algo : {Algorithm::rsh1, Algorithm::rsh2}) {
            const AbsorbingChain chain = make_chain(algo, problem);
            std::printf("%-14s %s  ", name.c_str(), std::string(to_string(algo)).c_str());
            try {
                const HittingTimes t = hitting_times(chain);
                std::printf("h(0)=%.6g  h(50)=%.6g  uniform=%.6g\n", t.h[0], t.h[50],
                            expected_hitting_time(t, uniform_initial(chain)));
            } catch (const SingularSystem &) {
                std::printf("optimum unreachable from some state\n");
            }
        }
    }
}
