#ifndef RATCHET_RATCHET_HPP
#define RATCHET_RATCHET_HPP

#include "ratchet/adiabatic.hpp"
#include "ratchet/dynamics.hpp"
#include "ratchet/ensemble.hpp"
#include "ratchet/errors.hpp"
#include "ratchet/expansion.hpp"
#include "ratchet/forcing.hpp"
#include "ratchet/integrate.hpp"
#include "ratchet/io.hpp"
#include "ratchet/limit_cycle.hpp"
#include "ratchet/numerics.hpp"
#include "ratchet/potential.hpp"

#endif
