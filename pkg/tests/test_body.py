# Copyright (C) 2026 The imitator developers
#
# This file is free software; you can redistribute it and/or modify it
# under the terms of the GNU General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.

"""A testsuite for the body module."""

import math
import os
import tempfile
import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from imitator import body
from imitator.body import JOINT, AvatarConfig, BodyModel, PoseParams
from imitator.types import ValidationError


def _axis_angle(vec):
    """Rodrigues' formula written out, for checking the library."""
    theta = np.linalg.norm(vec)
    if theta == 0:
        return np.eye(3)
    kx, ky, kz = np.asarray(vec) / theta
    skew = np.array([[0, -kz, ky], [kz, 0, -kx], [-ky, kx, 0]])
    return np.eye(3) + math.sin(theta) * skew + \
        (1 - math.cos(theta)) * skew @ skew


def _reference_lbs(model, pose):
    """Per-vertex linear blend skinning with explicit loops."""
    njoints = model.n_joints
    glob = [None] * njoints
    rest = [None] * njoints
    for j in range(njoints):
        local = np.eye(4)
        local[:3, :3] = _axis_angle(pose.joint_rotations[j])
        local[:3, 3] = model.joint_offsets[j]
        shift = np.eye(4)
        shift[:3, 3] = model.joint_offsets[j]
        parent = model.joint_parents[j]
        glob[j] = local if parent < 0 else glob[parent] @ local
        rest[j] = shift if parent < 0 else rest[parent] @ shift
    result = np.zeros((model.n_vertices, 3))
    for v, vert in enumerate(model.rest_vertices):
        point = np.append(vert, 1.0)
        for j in range(njoints):
            weight = model.skin_weights[v, j]
            if weight:
                result[v] += weight * (glob[j] @ np.linalg.inv(rest[j]) @
                                       point)[:3]
    root = _axis_angle(pose.root_rotation)
    return pose.scale * result @ root.T + pose.root_translation


def _chain_model():
    """Three joints stacked along +y, one vertex on each."""
    return BodyModel(rest_vertices=np.array([[0, 0, 0], [0, 1, 0],
                                             [0, 2, 0.0]]),
                     faces=np.array([[0, 1, 2]]),
                     uv_coords=np.array([[[0, 0], [1, 0], [0, 1.0]]]),
                     joint_parents=(-1, 0, 1),
                     joint_offsets=np.array([[0, 0, 0], [0, 1, 0],
                                             [0, 1, 0.0]]),
                     skin_weights=np.eye(3))


class TestRodrigues(unittest.TestCase):
    """Tests for the axis-angle conversion."""

    @given(st.lists(st.floats(-6, 6), min_size=3, max_size=3))
    @settings(max_examples=50)
    def test_matches_formula(self, vec):
        """Test rodrigues() against the written-out formula."""
        self.assertTrue(np.allclose(body.rodrigues(vec), _axis_angle(vec),
                                    atol=1e-12))

    def test_batch_shape(self):
        """Test a batch keeps its leading dimensions."""
        self.assertEqual(body.rodrigues(np.zeros((4, 2, 3))).shape,
                         (4, 2, 3, 3))

    def test_readonly_input(self):
        """Test a frozen pose array converts and stays untouched."""
        rots = np.zeros((17, 3))
        rots[5] = (0.2, -0.4, 0.9)
        pose = PoseParams(rots)
        self.assertFalse(pose.joint_rotations.flags.writeable)
        mats = body.rodrigues(pose.joint_rotations)
        self.assertTrue(np.allclose(mats[5], _axis_angle(rots[5]),
                                    atol=1e-12))
        self.assertTrue(np.array_equal(pose.joint_rotations, rots))
        self.assertEqual(body.joint_positions(
            body.build_canonical_humanoid(), pose).shape, (17, 3))


class TestAvatarConfig(unittest.TestCase):
    """Tests for AvatarConfig."""

    def test_zero_radius(self):
        """Test a zero torso radius is rejected."""
        with self.assertRaises(ValidationError):
            AvatarConfig(torso_radius=0)

    def test_too_few_sides(self):
        """Test a tube needs at least three sides."""
        with self.assertRaises(ValidationError):
            AvatarConfig(sides=2)

    def test_wrong_types(self):
        """Test strings in place of numbers are validation errors."""
        with self.assertRaises(ValidationError):
            AvatarConfig.from_dict({'torso_radius': '0.2'})
        with self.assertRaises(ValidationError):
            AvatarConfig.from_dict({'sides': '20'})

    def test_unknown_key(self):
        """Test from_dict() rejects unknown keys."""
        with self.assertRaises(ValidationError):
            AvatarConfig.from_dict({'tail_length': 0.5})

    def test_load(self):
        """Test loading a JSON document."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'avatar.json')
            with open(path, 'w', encoding='utf-8') as out:
                out.write('{"sides": 12, "arm_radius": 0.05}')
            cfg = AvatarConfig.load(path)
        self.assertEqual(cfg.sides, 12)
        self.assertEqual(cfg.arm_radius, 0.05)
        self.assertEqual(AvatarConfig.from_dict(cfg.to_dict()), cfg)


class TestCanonicalHumanoid(unittest.TestCase):
    """Tests for build_canonical_humanoid()."""

    @classmethod
    def setUpClass(cls):
        """Build the default humanoid once."""
        cls.model = body.build_canonical_humanoid()

    def test_invariants(self):
        """Test the default model satisfies its structural invariants."""
        model = self.model
        self.assertGreaterEqual(model.n_joints, 16)
        model.validate()
        self.assertTrue(np.all(model.skin_weights >= 0))
        self.assertTrue(np.allclose(model.skin_weights.sum(axis=1), 1,
                                    atol=1e-6))
        self.assertTrue(model.uv_coords.min() >= 0)
        self.assertTrue(model.uv_coords.max() <= 1)
        self.assertTrue(model.check_mirror_islands())
        self.assertEqual(set(model.part_names), set(model.islands))

    def test_symmetric(self):
        """Test the vertex set is symmetric under x -> -x."""
        verts = self.model.rest_vertices
        mirrored = verts * (-1, 1, 1)
        dist = np.linalg.norm(verts[:, None] - mirrored[None], axis=2)
        self.assertLess(dist.min(axis=1).max(), 1e-6)

    def test_outward_faces(self):
        """Test the closed surface encloses a positive volume."""
        tri = self.model.rest_vertices[self.model.faces]
        volume = np.einsum('ij,ij->i', tri[:, 0],
                           np.cross(tri[:, 1], tri[:, 2])).sum() / 6
        self.assertGreater(volume, 0)

    def test_readonly(self):
        """Test model arrays cannot be modified."""
        with self.assertRaises(ValueError):
            self.model.rest_vertices[0, 0] = 1.0

    def test_subtree(self):
        """Test the left elbow subtree."""
        self.assertEqual(self.model.subtree(JOINT['left_elbow']),
                         {JOINT['left_elbow'], JOINT['left_wrist']})
        self.assertEqual(len(self.model.subtree(0)), self.model.n_joints)

    def test_custom_config(self):
        """Test a coarser tessellation gives fewer vertices."""
        coarse = body.build_canonical_humanoid(AvatarConfig(sides=8))
        self.assertLess(coarse.n_vertices, self.model.n_vertices)
        self.assertTrue(coarse.check_mirror_islands())


class TestBodyModel(unittest.TestCase):
    """Tests for BodyModel validation."""

    def test_bad_weights(self):
        """Test weights must sum to one."""
        with self.assertRaises(ValidationError):
            BodyModel(np.zeros((3, 3)), [[0, 1, 2]], np.zeros((1, 3, 2)),
                      (-1,), np.zeros((1, 3)), np.full((3, 1), 0.5))

    def test_bad_face(self):
        """Test faces must reference existing vertices."""
        with self.assertRaises(ValidationError):
            BodyModel(np.zeros((3, 3)), [[0, 1, 3]], np.zeros((1, 3, 2)),
                      (-1,), np.zeros((1, 3)), np.ones((3, 1)))

    def test_bad_parent(self):
        """Test parents must precede their children."""
        with self.assertRaises(ValidationError):
            BodyModel(np.zeros((3, 3)), [[0, 1, 2]], np.zeros((1, 3, 2)),
                      (-1, 2, 0), np.zeros((3, 3)), np.eye(3))

    def test_bad_uv(self):
        """Test UV coordinates must lie in the unit square."""
        with self.assertRaises(ValidationError):
            BodyModel(np.zeros((3, 3)), [[0, 1, 2]],
                      np.full((1, 3, 2), 1.5), (-1,), np.zeros((1, 3)),
                      np.ones((3, 1)))


class TestPoseParams(unittest.TestCase):
    """Tests for PoseParams."""

    def test_nonfinite(self):
        """Test NaN rotations are rejected."""
        rots = np.zeros((17, 3))
        rots[3, 1] = np.nan
        with self.assertRaises(ValidationError):
            PoseParams(rots)

    def test_scale(self):
        """Test the scale must be positive."""
        with self.assertRaises(ValidationError):
            PoseParams(np.zeros((17, 3)), scale=0)

    def test_identity(self):
        """Test identity() gives zero rotations."""
        pose = PoseParams.identity(17)
        self.assertEqual(pose.n_joints, 17)
        self.assertFalse(pose.joint_rotations.any())
        self.assertEqual(pose.to_dict()['scale'], 1.0)


class TestPoseMesh(unittest.TestCase):
    """Tests for pose_mesh() and joint_positions()."""

    @classmethod
    def setUpClass(cls):
        """Build the default humanoid once."""
        cls.model = body.build_canonical_humanoid()

    def test_identity(self):
        """Test the identity pose reproduces the rest mesh."""
        mesh = body.pose_mesh(self.model, PoseParams.identity(17))
        self.assertTrue(np.allclose(mesh.vertices, self.model.rest_vertices,
                                    rtol=0, atol=1e-9))

    def test_root_rotation(self):
        """Test a root rotation rotates every vertex."""
        rotvec = np.array([0.3, -1.1, 0.4])
        pose = PoseParams(np.zeros((17, 3)), root_rotation=rotvec)
        mesh = body.pose_mesh(self.model, pose)
        expect = self.model.rest_vertices @ _axis_angle(rotvec).T
        self.assertTrue(np.allclose(mesh.vertices, expect, atol=1e-9))

    def test_elbow_moves_subtree_only(self):
        """Test an elbow bend moves exactly the vertices it weights."""
        rots = np.zeros((17, 3))
        rots[JOINT['left_elbow']] = np.ones(3) / math.sqrt(3) * math.pi / 2
        mesh = body.pose_mesh(self.model, PoseParams(rots))
        moved = np.linalg.norm(mesh.vertices - self.model.rest_vertices,
                               axis=1) > 1e-9
        subtree = sorted(self.model.subtree(JOINT['left_elbow']))
        weighted = self.model.skin_weights[:, subtree].sum(axis=1) > 0
        self.assertTrue(np.array_equal(moved, weighted))
        self.assertTrue(weighted.any())

    def test_matches_reference(self):
        """Test against an explicit per-vertex LBS implementation."""
        rng = np.random.default_rng(7)
        pose = PoseParams(rng.uniform(-0.8, 0.8, (17, 3)),
                          rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3), 1.3)
        mesh = body.pose_mesh(self.model, pose)
        self.assertTrue(np.allclose(mesh.vertices,
                                    _reference_lbs(self.model, pose),
                                    rtol=0, atol=1e-9))

    def test_rotation_equivariance(self):
        """Test an extra root rotation rotates the posed mesh."""
        rng = np.random.default_rng(3)
        rots = rng.uniform(-0.5, 0.5, (17, 3))
        posed = body.pose_mesh(self.model, PoseParams(rots)).vertices
        rotvec = rng.uniform(-2, 2, 3)
        turned = body.pose_mesh(self.model, PoseParams(
            rots, root_rotation=rotvec)).vertices
        expect = posed @ Rotation.from_rotvec(rotvec).as_matrix().T
        self.assertTrue(np.allclose(turned, expect, atol=1e-9))

    def test_unpose(self):
        """Test removing the root similarity recovers the rest mesh."""
        rotvec, trans, scale = np.array([0.1, 2.0, -0.3]), \
            np.array([0.5, -0.2, 3.0]), 0.8
        mesh = body.pose_mesh(self.model, PoseParams(
            np.zeros((17, 3)), rotvec, trans, scale))
        back = (mesh.vertices - trans) @ _axis_angle(rotvec) / scale
        self.assertTrue(np.allclose(back, self.model.rest_vertices,
                                    atol=1e-9))

    def test_small_perturbation(self):
        """Test a tiny joint rotation moves vertices by a tiny amount."""
        rots = np.zeros((17, 3))
        base = body.pose_mesh(self.model, PoseParams(rots)).vertices
        rots[JOINT['left_knee']] = (5e-5, 0, 0)
        moved = body.pose_mesh(self.model, PoseParams(rots)).vertices
        self.assertLess(np.abs(moved - base).max(), 5e-5 * 2)

    def test_wrong_joint_count(self):
        """Test a pose for another skeleton is rejected."""
        with self.assertRaises(ValidationError):
            body.pose_mesh(self.model, PoseParams.identity(5))

    def test_joints_identity(self):
        """Test the identity pose puts joints at their rest positions."""
        joints = body.joint_positions(self.model, PoseParams.identity(17))
        expect = np.zeros((17, 3))
        for num, parent in enumerate(self.model.joint_parents):
            expect[num] = self.model.joint_offsets[num] + \
                (expect[parent] if parent >= 0 else 0)
        self.assertTrue(np.allclose(joints, expect, atol=1e-12))

    def test_joints_translation(self):
        """Test a root translation shifts every joint."""
        trans = np.array([0.1, 0.2, -0.3])
        pose = PoseParams(np.zeros((17, 3)), root_translation=trans)
        joints = body.joint_positions(self.model, pose)
        self.assertTrue(np.allclose(joints - self.model.rest_joints, trans,
                                    atol=1e-12))

    def test_chain(self):
        """Test a quarter turn at the middle of a chain swings its tip."""
        model = _chain_model()
        rots = np.zeros((3, 3))
        rots[1] = (0, 0, -math.pi / 2)
        joints = body.joint_positions(model, PoseParams(rots))
        self.assertTrue(np.allclose(joints[2], (1, 1, 0), atol=1e-12))
        mesh = body.pose_mesh(model, PoseParams(rots))
        self.assertTrue(np.allclose(mesh.vertices[2], (1, 1, 0), atol=1e-12))


class TestMesh(unittest.TestCase):
    """Tests for Mesh."""

    def test_area(self):
        """Test the area of a unit right triangle."""
        mesh = body.Mesh(np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0.0]]),
                         np.array([[0, 1, 2]]), np.zeros((1, 3, 2)))
        self.assertAlmostEqual(mesh.surface_area(), 0.5)

    def test_to_obj(self):
        """Test OBJ export counts."""
        model = body.build_canonical_humanoid(AvatarConfig(sides=6))
        mesh = body.pose_mesh(model, PoseParams.identity(17))
        with tempfile.TemporaryDirectory() as tmpdir:
            path = os.path.join(tmpdir, 'mesh.obj')
            mesh.to_obj(path)
            with open(path, encoding='utf-8') as obj:
                lines = obj.read().splitlines()
        self.assertEqual(sum(ln.startswith('v ') for ln in lines),
                         model.n_vertices)
        self.assertEqual(sum(ln.startswith('vt ') for ln in lines),
                         3 * len(model.faces))
        self.assertEqual(sum(ln.startswith('f ') for ln in lines),
                         len(model.faces))
