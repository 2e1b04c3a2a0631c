#pragma once

#include "xcount/ensemble.hpp"

#include <string>

namespace xcount::test {

inline std::string fixture(const std::string& name) { return std::string(XCOUNT_FIXTURE_DIR) + "/" + name; }

inline Ensemble load_fixture(const std::string& name, int precision) {
    return quantize_leaves(load_ensemble(fixture(name)), precision);
}

} // namespace xcount::test
