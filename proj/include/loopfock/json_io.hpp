#pragma once

#include <string>

#include "loopfock/loopgrp.hpp"
#include "loopfock/potential.hpp"
#include "loopfock/relations.hpp"

namespace loopfock {

// JSON formats (stable, canonical ordering, coefficients as fraction strings):
//   window:    {"N":..,"K":..,"D":..,"G":..,"L":..}
//   series:    {"window":{...},"terms":[{"mono":[[mu,k],...],"coeff":"p/q"},...]}
//              (tau-form terms additionally carry "hbar" when nonzero)
//   potential: {"window":{...},"unit":["1",...],"F":[series,...]}
//   element:   {"N":2,"kind":"upper","matrices":[{"l":1,"m":[["1/2","0"],["0","-1/3"]]},...]}
//   exactness: {"history":"upper","weight":3,"build":{...}}

std::string window_to_json(const Window& w);
Window window_from_json(const std::string& text);

std::string series_to_json(const TruncatedSeries& s);
TruncatedSeries series_from_json(const std::string& text);

std::string potential_to_json(const Potential& p);
Potential potential_from_json(const std::string& text);

std::string element_to_json(const LoopAlgebraElement& e);
LoopAlgebraElement element_from_json(const std::string& text);

std::string exact_region_to_json(const ExactRegion& r);
ExactRegion exact_region_from_json(const std::string& text);

std::string invariance_report_to_json(const InvarianceReport& rep);

// Operator dump for debugging.
struct QuantizedOperator;

}  // namespace loopfock
