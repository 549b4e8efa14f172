#ifndef PERMUTON_CURVES_HPP
#define PERMUTON_CURVES_HPP

#include <string>
#include <vector>

namespace permuton {

struct CurvePoint {
    double t;
    double x;
    double y;
};

/// A labelled parametric curve in the unit square, ordered by increasing t.
struct RegionCurve {
    std::string label;
    std::vector<CurvePoint> points;
};

}

#endif
