use mvlab_core::calibration::{
    calibration_from_iac, decompose_camera, essential_from_pose, image_of_absolute_conic, is_essential, is_essential_exact, CalibratedConfig,
    ESSENTIAL_TOL,
};
use mvlab_core::cones::{decalibration_fiber, pencil_classify, residual_calibration, twisted_pair};
use mvlab_core::epipolar::{epipoles, fundamental_from_pair, seven_point, seven_point_f64, Correspondence, SevenPointSolution};
use mvlab_core::multiview::{constraint_polynomials, membership_rank, recover_homography, resect, triangulate, CameraConfig};
use mvlab_core::poly::ProjectiveRoot;
use mvlab_core::projective::{Camera, Conic2, HPoint2, HPoint3, Quadric3, SpaceConic};
use mvlab_core::scalar::DEFAULT_TOL;
use mvlab_core::{scene, ExactField, Gaussian};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::codec::{complex, encode_mat, encode_vec, list, matrix, vector, Codec};
use crate::{CliError, Command, Mode, Request};

/// An input object whose keys are checked against an allow-list.
struct Obj<'a>(&'a Map<String, Value>);

impl<'a> Obj<'a> {
    fn new(v: &'a Value, allowed: &[&str]) -> Result<Self, CliError> {
        let m = v.as_object().ok_or_else(|| CliError::Parse(format!("expected an object, found {v}")))?;
        if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::Parse(format!("unknown field {k:?}; expected one of {allowed:?}")));
        }
        Ok(Self(m))
    }

    fn get(&self, k: &str) -> Result<&'a Value, CliError> {
        self.0.get(k).ok_or_else(|| CliError::Parse(format!("missing field {k:?}")))
    }

    fn opt(&self, k: &str) -> Option<&'a Value> {
        self.0.get(k)
    }
}

fn camera<F: Codec>(v: &Value) -> Result<Camera<F>, CliError> {
    Ok(Camera::new(matrix(v, 3, 4)?)?)
}

fn config<F: Codec>(v: &Value) -> Result<CameraConfig<F>, CliError> {
    Ok(CameraConfig::new(list(v, camera)?)?)
}

fn point2<F: Codec>(v: &Value) -> Result<HPoint2<F>, CliError> {
    Ok(HPoint2::new(vector(v, 3)?)?)
}

fn point3<F: Codec>(v: &Value) -> Result<HPoint3<F>, CliError> {
    Ok(HPoint3::new(vector(v, 4)?)?)
}

fn correspondence<F: Codec>(v: &Value) -> Result<Correspondence<F>, CliError> {
    Ok(Correspondence::new(list(v, point2)?))
}

fn conic<F: Codec>(v: &Value) -> Result<Conic2<F>, CliError> {
    Ok(Conic2::new(matrix(v, 3, 3)?)?)
}

fn quadric<F: Codec>(v: &Value) -> Result<Quadric3<F>, CliError> {
    Ok(Quadric3::new(matrix(v, 4, 4)?)?)
}

fn space_conic<F: Codec>(v: &Value) -> Result<SpaceConic<F>, CliError> {
    let o = Obj::new(v, &["plane", "quadric"])?;
    Ok(SpaceConic::new(vector(o.get("plane")?, 4)?, quadric(o.get("quadric")?)?)?)
}

fn encode_space_conic<F: Codec>(c: &SpaceConic<F>) -> Value {
    json!({
        "plane": encode_vec(c.plane()),
        "quadric": encode_mat(c.quadric().matrix()),
        "degeneracy": c.degeneracy().as_str(),
    })
}

fn encode_cameras<F: Codec>(c: &CameraConfig<F>) -> Value {
    Value::Array(c.cameras().iter().map(|p| encode_mat(p.matrix())).collect())
}

fn encode_root<F: Codec + ExactField>(r: &ProjectiveRoot<F>) -> Value {
    match (r.exact_coords(), r) {
        (Some((l, m)), _) => json!({ "lambda": l.encode(), "mu": m.encode() }),
        (None, ProjectiveRoot::Finite(v)) => json!({ "approx": complex(v.approx()) }),
        (None, ProjectiveRoot::Infinity) => json!({ "lambda": "1", "mu": "0" }),
    }
}

fn fundamental<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["P1", "P2"])?;
    let a = fundamental_from_pair(&camera::<F>(o.get("P1")?)?, &camera(o.get("P2")?)?)?;
    let (left, right) = epipoles(&a)?;
    Ok(json!({
        "A": encode_mat(a.matrix()),
        "rank": a.rank(),
        "epipoles": { "left": encode_vec(left.coords()), "right": encode_vec(right.coords()) },
    }))
}

fn seven_point_exact(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["correspondences"])?;
    let corrs = list(o.get("correspondences")?, correspondence::<Gaussian>)?;
    let sp = seven_point(&corrs)?;
    let solutions: Vec<Value> = sp
        .solutions
        .iter()
        .map(|s| match s {
            SevenPointSolution::Exact { lambda, mu, form, multiplicity } => json!({
                "exact": true,
                "lambda": lambda.encode(),
                "mu": mu.encode(),
                "form": encode_mat(form),
                "multiplicity": multiplicity,
            }),
            SevenPointSolution::Algebraic { factor, approx, multiplicity } => json!({
                "exact": false,
                "factor": encode_vec(factor.coeffs()),
                "root_approx": complex(*approx),
                "form_approx": sp.approx_form(s).iter().map(|r| r.iter().map(|z| complex(*z)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "multiplicity": multiplicity,
            }),
        })
        .collect();
    Ok(json!({
        "f1": encode_mat(&sp.f1),
        "f2": encode_mat(&sp.f2),
        "cubic": encode_vec(sp.cubic.coeffs()),
        "solutions": solutions,
        "determinants_certified": sp.certify_determinants(),
    }))
}

fn seven_point_float(input: &Value, tol: f64) -> Result<Value, CliError> {
    let o = Obj::new(input, &["correspondences"])?;
    let corrs = list(o.get("correspondences")?, correspondence::<f64>)?;
    let sp = seven_point_f64(&corrs, tol)?;
    Ok(json!({
        "real_solutions": sp.real_solutions.iter().map(encode_mat).collect::<Vec<_>>(),
        "complex_roots": sp.complex_roots.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
    }))
}

fn triangulate_cmd<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["cameras", "correspondence"])?;
    let x = triangulate(&config::<F>(o.get("cameras")?)?, &correspondence(o.get("correspondence")?)?)?;
    Ok(json!({ "point": encode_vec(x.coords()) }))
}

fn resect_cmd<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["world", "image"])?;
    let p = resect(&list(o.get("world")?, point3::<F>)?, &list(o.get("image")?, point2::<F>)?)?;
    Ok(json!({ "camera": encode_mat(p.matrix()) }))
}

fn membership<F: Codec>(input: &Value, tol: Option<f64>) -> Result<Value, CliError> {
    let o = Obj::new(input, &["cameras", "correspondence"])?;
    let m = membership_rank(&config::<F>(o.get("cameras")?)?, &correspondence(o.get("correspondence")?)?, tol)?;
    Ok(json!({ "rank": m.rank, "on_joint_image": m.on_joint_image }))
}

fn equivalence<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["A", "B"])?;
    let h = recover_homography(&config::<F>(o.get("A")?)?, &config(o.get("B")?)?)?;
    Ok(json!({
        "equivalent": h.is_some(),
        "H": h.map(|h| encode_mat(h.matrix())).unwrap_or(Value::Null),
    }))
}

fn constraints<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["cameras", "correspondence"])?;
    let c = constraint_polynomials(&config::<F>(o.get("cameras")?)?)?;
    let mut out = json!({
        "bilinear": c.bilinear.iter().map(|(v, a)| json!({ "views": v, "form": encode_mat(a.matrix()) })).collect::<Vec<_>>(),
        "trilinear": c.trilinear.iter().map(|t| json!({ "views": t.views, "minors": t.count() })).collect::<Vec<_>>(),
    });
    if let Some(corr) = o.opt("correspondence") {
        out["vanish"] = json!(c.vanish_on(&correspondence(corr)?));
    }
    Ok(out)
}

fn decompose(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["P"])?;
    let d = decompose_camera(&camera::<f64>(o.get("P")?)?)?;
    Ok(json!({
        "K": encode_mat(&d.k),
        "R": encode_mat(&d.r),
        "C": encode_vec(&d.c),
        "orientation_reversed": d.orientation_reversed,
    }))
}

fn iac<F: Codec>(input: &Value) -> Result<(Value, mvlab_core::Mat<F>), CliError> {
    let o = Obj::new(input, &["P"])?;
    let w = image_of_absolute_conic(&camera::<F>(o.get("P")?)?)?;
    Ok((json!({ "omega": encode_mat(w.matrix()) }), w.matrix().clone()))
}

fn essential<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["R", "t"])?;
    let e = essential_from_pose(&matrix::<F>(o.get("R")?, 3, 3)?, &vector::<F>(o.get("t")?, 3)?)?;
    Ok(json!({ "E": encode_mat(&e) }))
}

fn is_essential_cmd(input: &Value, mode: Mode, tol: Option<f64>) -> Result<Value, CliError> {
    let o = Obj::new(input, &["E"])?;
    let answer = match mode {
        Mode::Exact => is_essential_exact(&matrix::<Gaussian>(o.get("E")?, 3, 3)?)?,
        Mode::Float => is_essential(&matrix::<f64>(o.get("E")?, 3, 3)?, tol.unwrap_or(ESSENTIAL_TOL))?,
    };
    Ok(json!({ "essential": answer }))
}

fn classify_cones(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["Q1", "Q2"])?;
    let c = pencil_classify(&quadric::<Gaussian>(o.get("Q1")?)?, &quadric(o.get("Q2")?)?)?;
    Ok(json!({
        "class": c.class.as_str(),
        "singular_pencil": c.singular_pencil,
        "det_form": encode_vec(c.det_form.coeffs()),
        "roots": c.roots.iter().map(|r| json!({
            "root": encode_root(&r.root),
            "multiplicity": r.multiplicity,
            "rank": r.rank,
        })).collect::<Vec<_>>(),
        "rank_two_member": c.rank_two_member.map(|(l, m)| json!({ "lambda": l.encode(), "mu": m.encode() })),
    }))
}

fn views_and_conics(o: &Obj<'_>) -> Result<(CameraConfig<Gaussian>, Vec<Conic2<Gaussian>>), CliError> {
    Ok((config(o.get("cameras")?)?, list(o.get("conics")?, conic)?))
}

fn fiber(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["cameras", "conics"])?;
    let (cfg, conics) = views_and_conics(&o)?;
    let f = decalibration_fiber(&cfg, &conics)?;
    Ok(json!({
        "class": f.class.as_str(),
        "length": f.len(),
        "conics": f.conics.iter().map(encode_space_conic).collect::<Vec<_>>(),
    }))
}

fn residual(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["cameras", "conics", "space_conic"])?;
    let (cfg, conics) = views_and_conics(&o)?;
    let cal = CalibratedConfig::new(cfg, conics, space_conic(o.get("space_conic")?)?)?;
    let res = residual_calibration(&cal)?;
    Ok(json!({ "space_conic": encode_space_conic(res.space_conic()) }))
}

fn twist<F: Codec>(input: &Value) -> Result<Value, CliError> {
    let o = Obj::new(input, &["R", "t"])?;
    let tp = twisted_pair(&matrix::<F>(o.get("R")?, 3, 3)?, &vector::<F>(o.get("t")?, 3)?)?;
    Ok(json!({
        "R_t": encode_mat(&tp.r_t),
        "core": encode_mat(&tp.r_t_core),
        "P1": encode_mat(tp.p1.matrix()),
        "P2": encode_mat(tp.p2.matrix()),
        "P2_twisted": encode_mat(tp.p2_twisted.matrix()),
        "H": encode_mat(tp.h.matrix()),
        "G": tp.camera_involution.as_ref().map(|g| encode_mat(g.matrix())),
        "residual_plane": encode_vec(&tp.residual_plane),
        "degenerate": tp.degenerate,
    }))
}

fn simulate<F: Codec>(req: &Request) -> Result<Value, CliError> {
    if req.views < 2 {
        return Err(CliError::Usage("simulate needs at least two views".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let s = scene::simulate::<F>(&mut rng, req.views, req.points);
    Ok(json!({
        "seed": req.seed,
        "cameras": encode_cameras(&s.config),
        "points": s.points.iter().map(|x| encode_vec(x.coords())).collect::<Vec<_>>(),
        "correspondences": s.correspondences.iter().map(|c| c.points.iter().map(|p| encode_vec(p.coords())).collect::<Vec<_>>()).collect::<Vec<_>>(),
    }))
}

macro_rules! by_mode {
    ($mode:expr, $f:ident ( $($arg:expr),* )) => {
        match $mode {
            Mode::Exact => $f::<Gaussian>($($arg),*),
            Mode::Float => $f::<f64>($($arg),*),
        }
    };
}

pub(crate) fn run(req: &Request) -> Result<Value, CliError> {
    use Command::*;
    if req.command == Simulate {
        return by_mode!(req.mode, simulate(req));
    }
    let input = req.input.as_ref().ok_or_else(|| CliError::Usage("missing input document".into()))?;
    let float_tol = req.tol.unwrap_or(DEFAULT_TOL);
    match req.command {
        Fundamental => by_mode!(req.mode, fundamental(input)),
        SevenPoint => match req.mode {
            Mode::Exact => seven_point_exact(input),
            Mode::Float => seven_point_float(input, float_tol),
        },
        Triangulate => by_mode!(req.mode, triangulate_cmd(input)),
        Resect => by_mode!(req.mode, resect_cmd(input)),
        Membership => match req.mode {
            Mode::Exact => membership::<Gaussian>(input, None),
            Mode::Float => membership::<f64>(input, Some(float_tol)),
        },
        Equivalence => by_mode!(req.mode, equivalence(input)),
        Constraints => by_mode!(req.mode, constraints(input)),
        Decompose => decompose(input),
        Iac => match req.mode {
            Mode::Exact => Ok(iac::<Gaussian>(input)?.0),
            Mode::Float => {
                let (mut out, w) = iac::<f64>(input)?;
                out["K"] = encode_mat(&calibration_from_iac(&w)?);
                Ok(out)
            }
        },
        Essential => by_mode!(req.mode, essential(input)),
        IsEssential => is_essential_cmd(input, req.mode, req.tol),
        ClassifyCones | Fiber | Residual if req.mode == Mode::Float => {
            Err(CliError::Usage(format!("{} is available in exact mode only", req.command.name())))
        }
        ClassifyCones => classify_cones(input),
        Fiber => fiber(input),
        Residual => residual(input),
        Twist => by_mode!(req.mode, twist(input)),
        Simulate => unreachable!("handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_parse_errors() {
        let mut req = Request::new(Command::Essential);
        req.input = Some(json!({ "R": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "t": [1, 0, 0], "extra": 1 }));
        let err = run(&req).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn essential_of_a_translation() {
        let mut req = Request::new(Command::Essential);
        req.input = Some(json!({ "R": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "t": ["1/2", 0, 0] }));
        let out = run(&req).unwrap();
        assert_eq!(out["E"], json!([["0", "0", "0"], ["0", "0", "-1/2"], ["0", "1/2", "0"]]));
    }

    #[test]
    fn float_mode_rejects_cone_operations() {
        let mut req = Request::new(Command::ClassifyCones);
        req.mode = Mode::Float;
        req.input = Some(json!({}));
        assert_eq!(run(&req).unwrap_err().exit_code(), 1);
    }
}
