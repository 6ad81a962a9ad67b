use crate::dynamics::Trajectory;
use crate::synthesis::SweepPoint;

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn row(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn planar_trajectory_csv(traj: &Trajectory<4>) -> String {
    let mut out = String::from("t,q1,q2,q1dot,q2dot,theta,wb,wb_lp,vb,F,T,energy\n");
    for s in &traj.samples {
        let x = &s.state;
        out.push_str(&row(&[
            s.t,
            x[0],
            x[1],
            x[2],
            x[3],
            x[0] + x[1],
            s.twist.w_b(),
            s.filtered_rate.y,
            s.twist.v_b(),
            s.control.planar_force(),
            s.control.planar_torque(),
            s.energy,
        ]));
    }
    out
}

pub fn spatial_trajectory_csv(traj: &Trajectory<10>) -> String {
    let mut out = String::from(
        "t,phi1x,phi1y,phi2x,phi2y,psi,phi1x_dot,phi1y_dot,phi2x_dot,phi2y_dot,psi_dot,\
         wx,wy,wz,wlp_x,wlp_y,wlp_z,vx,vy,vz,Fx,Fy,Fz,Tx,Ty,Tz,energy\n",
    );
    for s in &traj.samples {
        let mut v = vec![s.t];
        v.extend(s.state.iter());
        v.extend(s.twist.angular.iter());
        v.extend(s.filtered_rate.iter());
        v.extend(s.twist.linear.iter());
        v.extend(s.control.force.iter());
        v.extend(s.control.torque.iter());
        v.push(s.energy);
        out.push_str(&row(&v));
    }
    out
}

/// Failed points are written with `NaN` gains.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("sigma,kv,kw,cost,feasible,iterations,max_eig_M\n");
    for p in points {
        let line = match p.result() {
            Some(r) => {
                let kv = r.f.get((0, 0)).copied().unwrap_or(f64::NAN);
                let kw = r.f.get((1, 1)).copied().unwrap_or(f64::NAN);
                format!(
                    "{},{},{},{},{},{},{}\n",
                    fmt_f64(p.sigma),
                    fmt_f64(kv),
                    fmt_f64(kw),
                    fmt_f64(r.cost),
                    r.feasible,
                    r.iterations,
                    fmt_f64(r.max_eig_m)
                )
            }
            None => format!("{},NaN,NaN,NaN,false,0,NaN\n", fmt_f64(p.sigma)),
        };
        out.push_str(&line);
    }
    out
}
