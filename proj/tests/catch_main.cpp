// Copyright 2026 The qcbind Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.cpp>
