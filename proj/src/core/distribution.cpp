#include "distribution.hpp"

namespace rankwitness::dist {

JointDistribution<double> to_float(const JointDistribution<Rational>& dist) {
    std::vector<double> values;
    values.reserve(dist.size());
    for (const auto& v : dist.values()) values.push_back(v.get_d());
    return JointDistribution<double>::from_values(dist.axes(), std::move(values));
}

}  // namespace rankwitness::dist
