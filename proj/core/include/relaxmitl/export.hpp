#pragma once

#include <iosfwd>

#include "relaxmitl/energy.hpp"
#include "relaxmitl/product.hpp"
#include "relaxmitl/relaxed_tba.hpp"

namespace relaxmitl::io {

inline constexpr int kSchemaVersion = 1;

/// Full automaton: alphabet, conjuncts, clocks, states with v_c/v_d, edges.
void write_tba_json(std::ostream& os, const tba::RelaxedTba& t);

/// Graphviz rendering; states carry their evaluation and violation costs.
void write_tba_dot(std::ostream& os, const tba::RelaxedTba& t);

/// |P|, |delta_P|, accepting count, |F*| and energy summary.
void write_rpa_stats_json(std::ostream& os, const product::Rpa& rpa, const energy::EnergyTable& table);

}  // namespace relaxmitl::io
