#ifndef SPREADFRACT_SPREADFRACT_HPP
#define SPREADFRACT_SPREADFRACT_HPP

#include "error.hpp"
#include "ingest.hpp"
#include "series.hpp"
#include "fluctuation.hpp"
#include "multifractal.hpp"
#include "synth.hpp"

namespace spreadfract {

inline constexpr const char* version = "0.1.0";

} // namespace spreadfract

#endif // SPREADFRACT_SPREADFRACT_HPP
