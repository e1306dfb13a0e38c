#pragma once

#include <string>

namespace bbz {

/// Fixed text form for reals in output files: 17 significant digits, "nan" /
/// "inf" / "-inf" for non-finite values.
std::string format_real(double value);

}  // namespace bbz
