#pragma once

#include <clcoherence/errors.hpp>
#include <clcoherence/kinematics.hpp>
#include <clcoherence/parallel.hpp>
#include <clcoherence/fft.hpp>
#include <clcoherence/estate.hpp>
#include <clcoherence/coupling.hpp>
#include <clcoherence/spectra.hpp>
#include <clcoherence/detection.hpp>
#include <clcoherence/oracle.hpp>
#include <clcoherence/crosscheck.hpp>
#include <clcoherence/io.hpp>
#include <clcoherence/config.hpp>
#include <clcoherence/scenarios.hpp>
