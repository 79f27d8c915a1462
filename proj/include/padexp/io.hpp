#pragma once

#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "padexp/decay.hpp"
#include "padexp/expsum.hpp"
#include "padexp/histogram.hpp"
#include "padexp/polymap.hpp"
#include "padexp/singular.hpp"

namespace padexp {

using Json = nlohmann::ordered_json;

/// {"p", "M", "scale": "a/b", "counts": {"k": c}}
Json to_json(const PhaseHistogram& h);
PhaseHistogram histogram_from_json(const Json& j);

/// {"n", "r", "components": [[[e1..en], "a/b"], ...]}
Json to_json(const PolyMap& f);
PolyMap polymap_from_json(const Json& j);

Json to_json(const PruningStats& s);
Json to_json(const Valuation& v);  // integer or "inf"

/// Histogram plus magnitude, its error bound and the exact-zero flag.
Json value_json(const PhaseHistogram& h);

Json to_json(const DensityTable& t);
/// Columns z1..zr, N, F; one row per cell.
void write_density_csv(std::ostream& out, const DensityTable& t);

Json to_json(const StabilizationReport& r);

Json to_json(const DecayRecord& r);
/// Columns m, sup, sup_error, argmax_u, exhaustive.
void write_decay_csv(std::ostream& out, const std::vector<DecayRecord>& records);

Json to_json(const FitResult& f);
Json to_json(const BoundReport& r);

}  // namespace padexp
