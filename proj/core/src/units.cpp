#include "kerrtwpa/constants.hpp"

#include <cmath>

namespace kerrtwpa::units {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
double db_to_power_ratio(double db) { return std::pow(10.0, db / 10.0); }
double power_ratio_to_db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace kerrtwpa::units
