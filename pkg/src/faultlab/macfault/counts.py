"""Analytic multiply/add counts for CNN architecture descriptors.

Counts one multiply (and its paired accumulate add) per MAC for a single
input image; bias additions are not counted, matching the usual MAC
accounting for these architectures.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Conv2d:
    out_channels: int
    kernel: int
    stride: int = 1
    padding: int = 0


@dataclass(frozen=True)
class Pool:
    kernel: int
    stride: int | None = None


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class Linear:
    out_features: int


@dataclass(frozen=True)
class NetDescriptor:
    name: str
    input_shape: tuple  # (channels, height, width)
    layers: tuple


def mac_count(desc: NetDescriptor):
    """(multiplications, additions) to run one input through the network."""
    c, h, w = desc.input_shape
    if c < 1 or h < 1 or w < 1:
        raise ValueError(f"{desc.name}: bad input shape {desc.input_shape}")
    features = None  # set after Flatten
    mults = 0
    for layer in desc.layers:
        if isinstance(layer, Conv2d):
            if features is not None:
                raise ValueError(f"{desc.name}: conv after flatten")
            oh = (h + 2 * layer.padding - layer.kernel) // layer.stride + 1
            ow = (w + 2 * layer.padding - layer.kernel) // layer.stride + 1
            if oh < 1 or ow < 1:
                raise ValueError(f"{desc.name}: conv output {oh}x{ow} is degenerate")
            mults += oh * ow * layer.out_channels * layer.kernel * layer.kernel * c
            c, h, w = layer.out_channels, oh, ow
        elif isinstance(layer, Pool):
            stride = layer.stride or layer.kernel
            oh = (h - layer.kernel) // stride + 1
            ow = (w - layer.kernel) // stride + 1
            if oh < 1 or ow < 1:
                raise ValueError(f"{desc.name}: pool output {oh}x{ow} is degenerate")
            h, w = oh, ow
        elif isinstance(layer, Flatten):
            features = c * h * w
        elif isinstance(layer, Linear):
            if features is None:
                features = c * h * w
            mults += features * layer.out_features
            features = layer.out_features
        else:
            raise ValueError(f"{desc.name}: unknown layer {layer!r}")
    return mults, mults


def lenet5_descriptor() -> NetDescriptor:
    return NetDescriptor(
        name="LeNet-5",
        input_shape=(1, 32, 32),
        layers=(
            Conv2d(6, 5),
            Pool(2),
            Conv2d(16, 5),
            Pool(2),
            Conv2d(120, 5),
            Flatten(),
            Linear(84),
            Linear(10),
        ),
    )


def alexnet_descriptor() -> NetDescriptor:
    return NetDescriptor(
        name="AlexNet",
        input_shape=(3, 224, 224),
        layers=(
            Conv2d(64, 11, stride=4, padding=2),
            Pool(3, 2),
            Conv2d(192, 5, padding=2),
            Pool(3, 2),
            Conv2d(384, 3, padding=1),
            Conv2d(256, 3, padding=1),
            Conv2d(256, 3, padding=1),
            Pool(3, 2),
            Flatten(),
            Linear(4096),
            Linear(4096),
            Linear(1000),
        ),
    )
