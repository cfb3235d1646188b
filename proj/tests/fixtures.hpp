#ifndef SOSM_TESTS_FIXTURES_HPP
#define SOSM_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "sosm/parse.hpp"

namespace sosm::test {

inline std::string models_dir() { return SOSM_MODELS_DIR; }

inline const SosModel& efs() {
    static const SosModel m = load_model(models_dir() + "/efs.sosm");
    return m;
}

inline SosModel efs_no_adapters() { return load_model(models_dir() + "/efs_no_adapters.sosm"); }

/// Systems 1..n owned by "O" plus one exchange per (from, to) pair.
inline SosModel tiny(int n, const std::vector<std::pair<SystemId, SystemId>>& links) {
    SosModel m;
    m.name = "T";
    for (int i = 1; i <= n; ++i) m.systems.push_back({i, "s" + std::to_string(i), "O", ""});
    for (auto [a, b] : links) {
        Exchange e;
        e.label = std::to_string(a) + "." + std::to_string(b);
        e.from = a;
        e.to = b;
        m.exchanges.push_back(e);
    }
    return m;
}

} // namespace sosm::test

#endif
