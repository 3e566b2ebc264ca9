#include <pybind11/pybind11.h>
PYBIND11_MODULE(_loopfock, m) { m.doc() = "placeholder"; }
