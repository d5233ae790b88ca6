import numpy as np
import pytest

from vbrep.errors import InvalidAxisClass, SingularPoint
from vbrep.frames import (AlignmentFrame, AxisClass, TangentPerturbation,
                          frame_axis, perturb_unit, perturb_unit_jacobian,
                          rotate_jacobian, tangent_frame)
from vbrep.primitives import (Cone, Cylinder, Plane, Sphere, Torus,
                              canonicalize, distance, distance_gradients,
                              normal_at, signed_distance, uv_to_point)

from oracles import ALL_TYPES, brute_force_distance, random_primitive, rodrigues_reference

SQ2 = np.sqrt(2.0) / 2.0


class TestDistance:
    def test_sphere_radial(self):
        assert distance(Sphere((0, 0, 0), 1.0), (2, 0, 0)) == pytest.approx(1.0)

    def test_plane(self):
        assert distance(Plane((0, 0, 1), 0.0), (0, 0, 0.5)) == pytest.approx(0.5)

    def test_torus_equatorial(self):
        # Frozen from the dense-UV oracle (see test_oracle_equivalence).
        t = Torus((0, 0, 0), (0, 0, 1), 2.0, 0.5)
        assert distance(t, (3, 0, 0)) == pytest.approx(0.5, abs=1e-12)
        assert brute_force_distance(t, (3, 0, 0)) == pytest.approx(0.5, abs=1e-6)

    def test_cone_apex_region(self):
        c = Cone((0, 0, 0), (0, 0, 1), np.pi / 4)
        # Point behind the apex: the closest surface point is the apex itself.
        assert distance(c, (0, 0, -2.0)) == pytest.approx(2.0)

    @pytest.mark.parametrize("ptype", ALL_TYPES)
    def test_oracle_equivalence(self, ptype):
        rng = np.random.default_rng(101)
        for _ in range(25):
            s = random_primitive(ptype, rng)
            p = rng.uniform(-2, 2, size=3)
            assert distance(s, p) == pytest.approx(
                brute_force_distance(s, p), abs=1e-4)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(7)
        s = random_primitive("torus", rng)
        pts = rng.uniform(-2, 2, size=(32, 3))
        d = distance(s, pts)
        for i in range(len(pts)):
            assert d[i] == pytest.approx(distance(s, pts[i]), rel=1e-14, abs=1e-14)


class TestNormals:
    def test_sphere_pole(self):
        np.testing.assert_allclose(normal_at(Sphere((0, 0, 0), 1.0), (0, 0, 2)),
                                   [0, 0, 1])

    def test_cylinder_radial(self):
        cyl = Cylinder((0, 0, 1), (0, 0, 0), 1.0)
        np.testing.assert_allclose(normal_at(cyl, (2, 0, 5)), [1, 0, 0])

    def test_cone_on_surface(self):
        c = Cone((0, 0, 0), (0, 0, 1), np.pi / 4)
        np.testing.assert_allclose(normal_at(c, (1, 0, 1)), [SQ2, 0, -SQ2],
                                   atol=1e-12)

    def test_singular_raises(self):
        with pytest.raises(SingularPoint):
            normal_at(Sphere((0, 0, 0), 1.0), (0, 0, 0))
        with pytest.raises(SingularPoint):
            normal_at(Cylinder((0, 0, 1), (0, 0, 0), 1.0), (0, 0, 3))
        with pytest.raises(SingularPoint):
            normal_at(Torus((0, 0, 0), (0, 0, 1), 2.0, 0.5), (2, 0, 0))

    @pytest.mark.parametrize("ptype", ALL_TYPES)
    def test_matches_finite_difference(self, ptype):
        rng = np.random.default_rng(33)
        h = 1e-6
        checked = 0
        while checked < 40:
            s = random_primitive(ptype, rng)
            p = rng.uniform(-2, 2, size=3)
            if not _away_from_singularities(s, p):
                continue
            grad = np.array([
                (signed_distance(s, p + h * e) - signed_distance(s, p - h * e)) / (2 * h)
                for e in np.eye(3)
            ])
            np.testing.assert_allclose(normal_at(s, p), grad, atol=1e-5)
            checked += 1


def _away_from_singularities(s, p, margin=0.08):
    """Reject points near loci where the distance field is not smooth."""
    if isinstance(s, Plane):
        return abs(signed_distance(s, p)) > margin
    if isinstance(s, Sphere):
        return np.linalg.norm(p - s.center) > margin and abs(signed_distance(s, p)) > margin
    if isinstance(s, Cylinder):
        u = p - s.point
        rho = np.linalg.norm(u - (u @ s.axis) * s.axis)
        return rho > margin and abs(signed_distance(s, p)) > margin
    if isinstance(s, Cone):
        q = p - s.apex
        h = q @ s.axis
        rho = np.linalg.norm(q - h * s.axis)
        t = rho * np.sin(s.half_angle) + h * np.cos(s.half_angle)
        return rho > margin and abs(t) > margin and abs(signed_distance(s, p)) > margin
    if isinstance(s, Torus):
        u = p - s.center
        hh = u @ s.axis
        rho = np.linalg.norm(u - hh * s.axis)
        m = np.hypot(rho - s.major_radius, hh)
        return rho > margin and m > margin and abs(signed_distance(s, p)) > margin
    raise TypeError(type(s))


class TestUv:
    def test_sphere_pole_convention(self):
        np.testing.assert_allclose(uv_to_point(Sphere((0, 0, 0), 1.0), 0.0, 0.0),
                                   [0, 0, 1], atol=1e-15)

    def test_cylinder(self):
        cyl = Cylinder((0, 0, 1), (0, 0, 0), 1.0)
        np.testing.assert_allclose(uv_to_point(cyl, np.pi / 2, 3.0), [0, 1, 3],
                                   atol=1e-15)

    def test_torus_outer_point(self):
        t = Torus((0, 0, 0), (0, 0, 1), 2.0, 0.5)
        np.testing.assert_allclose(uv_to_point(t, 0.0, 0.0), [2.5, 0, 0],
                                   atol=1e-15)

    @pytest.mark.parametrize("ptype", ALL_TYPES)
    def test_on_surface(self, ptype):
        rng = np.random.default_rng(5)
        s = random_primitive(ptype, rng)
        u = rng.uniform(0, 2 * np.pi, size=50)
        v = rng.uniform(0.1, 2.0, size=50)
        pts = uv_to_point(s, u, v)
        np.testing.assert_allclose(distance(s, pts), 0.0, atol=1e-10)


class TestPerturbation:
    def test_identity(self):
        t = TangentPerturbation(base=(0, 0, 1))
        np.testing.assert_allclose(perturb_unit(t), [0, 0, 1])

    def test_tilt_45(self):
        t = TangentPerturbation(base=(0, 0, 1), u=1.0, v=0.0,
                                n=(1, 0, 0), b=(0, 1, 0))
        np.testing.assert_allclose(perturb_unit(t), [SQ2, 0, SQ2])

    def test_negative_v(self):
        t = TangentPerturbation(base=(0, 0, 1), u=0.0, v=-1.0,
                                n=(1, 0, 0), b=(0, 1, 0))
        np.testing.assert_allclose(perturb_unit(t), [0, -SQ2, SQ2])

    def test_unit_for_large_coefficients(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            base = rng.normal(size=3)
            base /= np.linalg.norm(base)
            t = TangentPerturbation(base=base, u=rng.uniform(-10, 10),
                                    v=rng.uniform(-10, 10))
            assert abs(np.linalg.norm(perturb_unit(t)) - 1.0) < 1e-12

    def test_jacobian(self):
        t = TangentPerturbation(base=np.array([0.6, 0.0, 0.8]), u=0.3, v=-0.7)
        J = perturb_unit_jacobian(t)
        h = 1e-7
        for j, (du, dv) in enumerate([(h, 0), (0, h)]):
            tp = TangentPerturbation(base=t.base, u=t.u + du, v=t.v + dv, n=t.n, b=t.b)
            tm = TangentPerturbation(base=t.base, u=t.u - du, v=t.v - dv, n=t.n, b=t.b)
            num = (perturb_unit(tp) - perturb_unit(tm)) / (2 * h)
            np.testing.assert_allclose(J[:, j], num, atol=1e-7)


class TestFrameAxis:
    def test_zero_rotation(self):
        np.testing.assert_allclose(frame_axis(np.zeros(3), AxisClass.Z), [0, 0, 1])

    def test_quarter_turn(self):
        np.testing.assert_allclose(frame_axis(np.array([0, 0, np.pi / 2]), AxisClass.X),
                                   [0, 1, 0], atol=1e-15)

    def test_rodrigues_oracle(self):
        omega = (np.pi / 3) * np.array([1, 1, 1]) / np.sqrt(3)
        np.testing.assert_allclose(frame_axis(omega, AxisClass.Y),
                                   rodrigues_reference(omega, [0, 1, 0]),
                                   atol=1e-14)

    def test_unaligned_rejected(self):
        with pytest.raises(InvalidAxisClass):
            frame_axis(np.zeros(3), AxisClass.UNALIGNED)

    def test_right_handed_orthonormal_triple(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            omega = rng.normal(size=3)
            omega *= rng.uniform(0, np.pi) / np.linalg.norm(omega)
            x = frame_axis(omega, AxisClass.X)
            y = frame_axis(omega, AxisClass.Y)
            z = frame_axis(omega, AxisClass.Z)
            M = np.stack([x, y, z], axis=1)
            np.testing.assert_allclose(M.T @ M, np.eye(3), atol=1e-12)
            assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-12)

    def test_rotation_jacobian_numeric(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            omega = rng.normal(size=3) * rng.uniform(0, 2.5)
            v = rng.normal(size=3)
            J = rotate_jacobian(omega, v)
            h = 1e-7
            num = np.stack([
                (rodrigues_reference(omega + h * e, v)
                 - rodrigues_reference(omega - h * e, v)) / (2 * h)
                for e in np.eye(3)
            ], axis=1)
            np.testing.assert_allclose(J, num, atol=1e-6)


class TestValidation:
    def test_non_unit_rejected(self):
        with pytest.raises(ValueError):
            Plane((0, 0, 2), 0.0)
        with pytest.raises(ValueError):
            Cylinder((0, 0, 0.5), (0, 0, 0), 1.0)

    def test_bad_radii(self):
        with pytest.raises(ValueError):
            Sphere((0, 0, 0), -1.0)
        with pytest.raises(ValueError):
            Torus((0, 0, 0), (0, 0, 1), 1.0, 1.5)

    def test_sphere_axis_class_rejected(self):
        with pytest.raises(ValueError):
            Sphere((0, 0, 0), 1.0, axis_class=AxisClass.X)

    def test_cone_half_angle_range(self):
        with pytest.raises(ValueError):
            Cone((0, 0, 0), (0, 0, 1), np.pi / 2)

    def test_frame_magnitude(self):
        with pytest.raises(ValueError):
            AlignmentFrame(np.array([0.0, 0.0, 4.0]))

    def test_tangent_frame_orthonormal(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = rng.normal(size=3)
            a /= np.linalg.norm(a)
            n, b = tangent_frame(a)
            assert abs(n @ b) < 1e-12 and abs(n @ a) < 1e-12 and abs(b @ a) < 1e-12
            np.testing.assert_allclose(np.cross(a, n), b, atol=1e-12)


class TestGradients:
    @pytest.mark.parametrize("ptype", ALL_TYPES)
    def test_point_gradient(self, ptype):
        rng = np.random.default_rng(77)
        h = 1e-6
        checked = 0
        while checked < 25:
            s = random_primitive(ptype, rng)
            p = rng.uniform(-2, 2, size=3)
            if not _away_from_singularities(s, p):
                continue
            _, g = distance_gradients(s, p)
            num = np.array([
                (distance(s, p + h * e) - distance(s, p - h * e)) / (2 * h)
                for e in np.eye(3)
            ])
            np.testing.assert_allclose(g["point"][0], num, atol=1e-5)
            checked += 1


class TestCanonicalize:
    def test_cylinder_gauge(self):
        c = Cylinder((0, 0, -1), (1, 1, 5), 0.5)
        cc = canonicalize(c)
        np.testing.assert_allclose(cc.axis, [0, 0, 1])
        assert abs(cc.point @ cc.axis) < 1e-12
        rng = np.random.default_rng(0)
        pts = rng.uniform(-2, 2, size=(20, 3))
        np.testing.assert_allclose(distance(c, pts), distance(cc, pts), atol=1e-12)

    def test_plane_gauge(self):
        p = canonicalize(Plane((0, 0, -1), -0.5))
        assert p.offset >= 0
        np.testing.assert_allclose(p.normal, [0, 0, 1])
        q = canonicalize(Plane((0, 0, -1), 0.5))
        assert q.offset == 0.5 and q.normal[2] == -1.0

    def test_cone_untouched(self):
        c = Cone((0, 0, 0), (0, 0, -1), 0.5)
        assert canonicalize(c) is c
