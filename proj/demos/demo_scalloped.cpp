// Feasible (rho_123, rho_321) region: prints the boundary and where a few
// staircase permutons land inside it. Pipe into a plotting tool of choice.

#include <cstdio>

#include "permuton/permuton.hpp"

using namespace permuton;

int main() {
    const Dimple d = dimple();
    std::printf("# dimple at (%.6f, %.6f), s = %.6f\n", d.r, d.r, d.s);
    std::printf("kind,label,x,y\n");
    for (const RegionCurve& c : region_123_321(41)) {
        for (const CurvePoint& p : c.points) {
            std::printf("curve,%s,%.6f,%.6f\n", c.label.c_str(), p.x, p.y);
        }
    }
    for (const SweepPoint& s : gamma_ab_sweep(5, 3, 200000, 3)) {
        std::printf("gamma,a=%.2f b=%.3f,%.6f,%.6f\n", s.a, s.b, s.rho123.value, s.rho321.value);
    }
    return 0;
}
