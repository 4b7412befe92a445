#ifndef ALOHAQSM_ALOHAQSM_HPP
#define ALOHAQSM_ALOHAQSM_HPP

#include <alohaqsm/admm.hpp>
#include <alohaqsm/aloha.hpp>
#include <alohaqsm/baselines.hpp>
#include <alohaqsm/dipole.hpp>
#include <alohaqsm/error.hpp>
#include <alohaqsm/fft.hpp>
#include <alohaqsm/forward.hpp>
#include <alohaqsm/haar.hpp>
#include <alohaqsm/hankel.hpp>
#include <alohaqsm/metrics.hpp>
#include <alohaqsm/noise.hpp>
#include <alohaqsm/phantom.hpp>
#include <alohaqsm/sweep.hpp>
#include <alohaqsm/volume.hpp>

#endif // ALOHAQSM_ALOHAQSM_HPP
