#ifndef NLC_NLC_HPP
#define NLC_NLC_HPP

#include "grid.hpp"
#include "field.hpp"
#include "fft.hpp"
#include "spectral.hpp"
#include "model.hpp"
#include "integrator.hpp"
#include "initial.hpp"
#include "fit.hpp"
#include "report.hpp"
#include "experiments.hpp"
#include "config.hpp"
#include "io.hpp"
#include "cli.hpp"

#endif // NLC_NLC_HPP
