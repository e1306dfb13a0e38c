#pragma once

// LAPACKE with std::complex as the complex type.
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
