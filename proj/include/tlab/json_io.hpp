#pragma once

#include <json.hpp>

#include "tlab/colim.hpp"
#include "tlab/tree.hpp"

namespace tlab {

// ordered_json keeps insertion order, so identical requests serialize
// byte-identically
using json = nlohmann::ordered_json;

// input that fails to match the documented schemas
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json int_to_json(const Int& v);  // number when it fits in 64 bits, else string
Int int_from_json(const json& j);

json mat_to_json(const Mat& m);  // {"rows": [[int,...],...]}
Mat mat_from_json(const json& j);

json lattice_to_json(const Lattice& l);  // {"dim": d, "basis": rows}
Lattice lattice_from_json(const json& j);

json ring_to_json(const Ring& r);  // {"inverted_primes": [...]} / {"local_prime": p}
Ring ring_from_json(const json& j);

json ordinal_to_json(const Ordinal& o);  // string in the w^e*c grammar
Ordinal ordinal_from_json(const json& j);

json tree_to_json(const FiniteTree& t);  // {"nodes": [[ints],...]}
FiniteTree tree_from_json(const json& j);

json tower_to_json(const TowerPtr& t);
TowerPtr tower_from_json(const json& j);

json digits_to_json(const PAdicDigits& d);  // {"p","digits","unit_mod_p"}
PAdicDigits digits_from_json(const json& j);

json colim_to_json(const ColimPtr& c);
ColimPtr colim_from_json(const json& j);

json verdict_to_json(const Verdict& v);
json length_report_to_json(const LengthReport& r);
json derived_levels_to_json(const DerivedLevels& d);
json straightness_to_json(const StraightnessReport& s);
json fishbone_verify_to_json(const FishboneVerifyReport& r);
json ext_report_to_json(const ExtReport& r);
json well_pointed_to_json(const WellPointedReport& r);
json sigma_report_to_json(const SigmaReport& r);
json resolution_to_json(const PhantomResolutionReport& r);

}  // namespace tlab
