# This file is a part of the dua_engine project
#
#    Copyright (C) 2026 dua_engine contributors
#
# This Source Code Form is subject to the terms of the Mozilla Public License,
# v. 2.0. If a copy of the MPL was not distributed with this file,You can
# obtain one at http://mozilla.org/MPL/2.0/.
from math import log

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from dua_engine.oracle.conv import naive_conv
from dua_engine.oracle.gradient import fd_gradient, relative_error
from dua_engine.tensor import functional as F
from dua_engine.tensor.exceptions import (
    DimensionException,
    LabelIndexException,
    ParameterException,
)


SEEDS = range(20)


def check_gradient(f, point, analytic):
    assert relative_error(analytic, fd_gradient(f, point)) < 1e-4


class TestConv2d:
    @pytest.fixture(autouse=True)
    def init_rng(self, np_rng):
        self.rng = np_rng

    def test_sum_of_ones(self):
        ones = np.ones((1, 1, 3, 3))
        out = F.conv2d_forward(ones, ones, [0])
        assert out.shape == (1, 1, 1, 1)
        assert out[0, 0, 0, 0] == 9.0

    def test_identity_kernel(self):
        x = self.rng.normal(size=(2, 1, 5, 5))
        weight = np.zeros((1, 1, 3, 3))
        weight[0, 0, 1, 1] = 1.0
        assert_array_equal(F.conv2d_forward(x, weight, [0], pad=1), x)

    def test_output_shape(self):
        x = self.rng.normal(size=(2, 3, 9, 7))
        out = F.conv2d_forward(
            x, self.rng.normal(size=(4, 3, 3, 2)), np.zeros(4), stride=2, pad=1
        )
        assert out.shape == (2, 4, 5, 4)

    def test_matches_naive_loop(self):
        x = self.rng.normal(size=(2, 3, 8, 8))
        weight = self.rng.normal(size=(4, 3, 3, 3))
        bias = self.rng.normal(size=4)
        expected = naive_conv(x, weight, bias, stride=1, pad=1)
        assert_allclose(
            F.conv2d_forward(x, weight, bias, pad=1), expected, atol=1e-12
        )

    def test_ordered_is_bit_identical_to_naive_loop(self):
        x = self.rng.normal(size=(2, 3, 7, 7))
        weight = self.rng.normal(size=(2, 3, 3, 3))
        bias = self.rng.normal(size=2)
        for stride, pad in ((1, 0), (1, 1), (2, 1)):
            assert_array_equal(
                F.conv2d_forward(
                    x, weight, bias, stride=stride, pad=pad, ordered=True
                ),
                naive_conv(x, weight, bias, stride=stride, pad=pad),
            )

    def test_channel_mismatch(self):
        with pytest.raises(DimensionException) as e:
            F.conv2d_forward(
                np.ones((1, 2, 4, 4)), np.ones((1, 3, 3, 3)), [0]
            )

        assert "'c'" in str(e.value)

    def test_bad_stride(self):
        with pytest.raises(ParameterException):
            F.conv2d_forward(
                np.ones((1, 1, 4, 4)), np.ones((1, 1, 3, 3)), [0], stride=0
            )

    def test_kernel_larger_than_input(self):
        with pytest.raises(DimensionException):
            F.conv2d_forward(np.ones((1, 1, 2, 2)), np.ones((1, 1, 3, 3)), [0])

    def test_backward_zero_grad(self):
        x = self.rng.normal(size=(1, 2, 4, 4))
        weight = self.rng.normal(size=(3, 2, 3, 3))
        grad = F.conv2d_backward(x, weight, np.zeros((1, 3, 4, 4)), pad=1)
        assert not grad.input_grad.any()
        assert not grad.param_grads["weight"].any()
        assert not grad.param_grads["bias"].any()

    def test_backward_scalar(self):
        grad = F.conv2d_backward(
            np.full((1, 1, 1, 1), 3.0),
            np.full((1, 1, 1, 1), 2.0),
            np.ones((1, 1, 1, 1)),
        )
        assert grad.param_grads["weight"][0, 0, 0, 0] == 3.0
        assert grad.input_grad[0, 0, 0, 0] == 2.0
        assert grad.param_grads["bias"][0] == 1.0

    @pytest.mark.parametrize("seed", SEEDS)
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(1, 2, 5, 5))
        weight = rng.normal(size=(3, 2, 3, 3))
        bias = rng.normal(size=3)
        for stride, pad in ((1, 1), (2, 1)):
            out = F.conv2d_forward(x, weight, bias, stride=stride, pad=pad)
            probe = rng.normal(size=out.shape)
            grad = F.conv2d_backward(x, weight, probe, stride=stride, pad=pad)

            def loss_x(value):
                return np.sum(
                    F.conv2d_forward(value, weight, bias, stride, pad) * probe
                )

            def loss_w(value):
                return np.sum(
                    F.conv2d_forward(x, value, bias, stride, pad) * probe
                )

            def loss_b(value):
                return np.sum(
                    F.conv2d_forward(x, weight, value, stride, pad) * probe
                )

            check_gradient(loss_x, x, grad.input_grad)
            check_gradient(loss_w, weight, grad.param_grads["weight"])
            check_gradient(loss_b, bias, grad.param_grads["bias"])


class TestLinear:
    @pytest.fixture(autouse=True)
    def init_rng(self, np_rng):
        self.rng = np_rng

    def test_identity_weight(self):
        x = self.rng.normal(size=(3, 4, 1, 1))
        assert_array_equal(F.linear_forward(x, np.eye(4), np.zeros(4)), x)

    def test_zero_weight(self):
        out = F.linear_forward(
            self.rng.normal(size=(3, 2, 2, 1)), np.zeros((2, 4)), [1.5, -2.0]
        )
        assert out.shape == (3, 2, 1, 1)
        assert_array_equal(out[:, :, 0, 0], [[1.5, -2.0]] * 3)

    def test_features_mismatch(self):
        with pytest.raises(DimensionException):
            F.linear_forward(np.ones((1, 5, 1, 1)), np.ones((2, 4)), [0, 0])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(3, 2, 2, 2))
        weight = rng.normal(size=(5, 8))
        bias = rng.normal(size=5)
        probe = rng.normal(size=(3, 5, 1, 1))
        grad = F.linear_backward(x, weight, probe)
        check_gradient(
            lambda v: np.sum(F.linear_forward(v, weight, bias) * probe),
            x,
            grad.input_grad,
        )
        check_gradient(
            lambda v: np.sum(F.linear_forward(x, v, bias) * probe),
            weight,
            grad.param_grads["weight"],
        )
        check_gradient(
            lambda v: np.sum(F.linear_forward(x, weight, v) * probe),
            bias,
            grad.param_grads["bias"],
        )


class TestPointwise:
    @pytest.fixture(autouse=True)
    def init_rng(self, np_rng):
        self.rng = np_rng

    def test_relu(self):
        out = F.relu_forward(np.array([-1.0, 0.0, 2.0]).reshape(1, 3, 1, 1))
        assert_array_equal(out.ravel(), [0, 0, 2])

    @pytest.mark.parametrize("seed", SEEDS)
    def test_relu_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=(2, 3, 4, 4))
        # keep away from the kink
        x[np.abs(x) < 1e-3] = 0.5
        probe = rng.normal(size=x.shape)
        check_gradient(
            lambda v: np.sum(F.relu_forward(v) * probe),
            x,
            F.relu_backward(x, probe).input_grad,
        )

    def test_maxpool_single_window(self):
        x = np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 1, 2, 2)
        out, argmax = F.maxpool2x2_forward(x)
        assert out.ravel().tolist() == [4.0]
        grad = F.maxpool2x2_backward(x, argmax, np.ones((1, 1, 1, 1)))
        assert grad.input_grad.reshape(2, 2).tolist() == [[0, 0], [0, 1]]

    def test_maxpool_odd_size(self):
        with pytest.raises(DimensionException):
            F.maxpool2x2_forward(np.ones((1, 1, 3, 4)))

    @pytest.mark.parametrize("seed", SEEDS)
    def test_maxpool_backward_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        # distinct values spaced well above the step
        x = rng.permutation(64).reshape(1, 1, 8, 8) * 0.01
        out, argmax = F.maxpool2x2_forward(x)
        probe = rng.normal(size=out.shape)
        check_gradient(
            lambda v: np.sum(F.maxpool2x2_forward(v)[0] * probe),
            x,
            F.maxpool2x2_backward(x, argmax, probe).input_grad,
        )

    def test_flatten(self):
        x = self.rng.normal(size=(2, 3, 2, 2))
        out = F.flatten(x)
        assert out.shape == (2, 12, 1, 1)
        assert_array_equal(out.ravel(), x.ravel())
        grad = F.flatten_backward(x, out)
        assert_array_equal(grad.input_grad, x)


class TestSoftmaxCrossEntropy:
    @pytest.fixture(autouse=True)
    def init_rng(self, np_rng):
        self.rng = np_rng

    def test_uniform_logits(self):
        loss, _ = F.softmax_cross_entropy(np.zeros((4, 10)), [0, 3, 5, 9])
        assert loss == pytest.approx(log(10), abs=1e-12)

    def test_saturated(self):
        logits = np.zeros((1, 10))
        logits[0, 7] = 1000.0
        loss, grad = F.softmax_cross_entropy(logits, [7])
        assert loss == pytest.approx(0.0, abs=1e-12)
        assert np.isfinite(grad).all()

    @pytest.mark.parametrize("seed", SEEDS)
    def test_gradient_matches_finite_differences(self, seed):
        rng = np.random.default_rng(seed)
        logits = rng.normal(size=(5, 10, 1, 1))
        labels = rng.integers(0, 10, 5)
        _, grad = F.softmax_cross_entropy(logits, labels)
        assert grad.shape == logits.shape
        check_gradient(
            lambda v: F.softmax_cross_entropy(v, labels)[0], logits, grad
        )

    def test_label_out_of_range(self):
        with pytest.raises(LabelIndexException):
            F.softmax_cross_entropy(np.zeros((2, 10)), [0, 10])

    def test_label_count(self):
        with pytest.raises(DimensionException):
            F.softmax_cross_entropy(np.zeros((2, 10)), [0])
