#pragma once

#include "ddlti/datagen.hpp"
#include "ddlti/ddrep.hpp"
#include "ddlti/error.hpp"
#include "ddlti/experiments.hpp"
#include "ddlti/format.hpp"
#include "ddlti/inversion.hpp"
#include "ddlti/latent_oracle.hpp"
#include "ddlti/lqr.hpp"
#include "ddlti/lti.hpp"
#include "ddlti/matpoly.hpp"
#include "ddlti/polynomial.hpp"
#include "ddlti/realization.hpp"
#include "ddlti/serialize.hpp"
