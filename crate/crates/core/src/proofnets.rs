//! Polarized proof nets and the net translation of typed objects.
//!
//! Formulas follow the polarized discipline in which every *output* is
//! negative and every *anti-output* positive:
//!
//! ```text
//! O ::= i | ?(Q) | O     (negative:  atoms and pars  ?Q ⅋ O)
//! Q ::= ~i | !(O) * Q    (positive:  co-atoms and tensors  !O ⊗ Q)
//! ```
//!
//! Nets are port graphs with cells `ax`, `cut`, `par`, `tensor`,
//! `dereliction`, `weakening`, `contraction` (n-ary) and nested `!`-boxes.
//! Structural rules apply to *any* negative formula, so both variable wires
//! (`?A`) and output wires can be contracted or weakened.
//!
//! [`translate`] maps a typable object to its net; administrative
//! axiom cuts arising from composition are eliminated eagerly, so the
//! purely multiplicative steps of the calculus (`dM`, `N`, `C`, `W`)
//! translate to structurally identical nets.  [`cut_redexes`] and
//! [`fire_cut`] implement the cut-elimination rules:
//!
//! * multiplicative: `C(ax)`, `C(⊗,⅋)` — their normal form is
//!   [`mult_normal_form`];
//! * exponential: `C(!,w)`, `C(!,d)`, `C(!,c)`, `C(!,!)`;
//! * ⊗-tree rules `C(⊗,w)`, `C(⊗,c)`, `C(⊗,!)` — a ⊗-tree is a right-
//!   leaning tensor chain of boxes ending in an axiom (the translation of a
//!   stack), and it behaves exactly like a box.
//!
//! [`ppn_equiv`] decides structural equivalence `≡` (associativity,
//! commutativity and neutrality of contractions, box-permeable structural
//! cells) by canonicalization followed by label-anchored graph isomorphism.
//! [`simulate_check`] verifies the simulation of a reduction step using the
//! cut rules its class is allowed to use.

use std::collections::{HashMap, HashSet};

use serde_json::{json, Value};
use thiserror::Error;

use crate::reduction::{RuleTag, Step};
use crate::syntax::{Command, Object, Stack, Term};
use crate::typing::{infer, SimpleType, StackType, SubjectType, TypeError};

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// A polarized formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    /// Positive atom `i` (negative polarity as an output formula).
    Atom(String),
    /// Dual atom `~i`.
    NegAtom(String),
    /// `?Q ⅋ O` — negative.
    Par(Box<Formula>, Box<Formula>),
    /// `!O ⊗ Q` — positive.
    Tensor(Box<Formula>, Box<Formula>),
    /// `!O` — positive.
    OfCourse(Box<Formula>),
    /// `?Q` — negative.
    WhyNot(Box<Formula>),
}

impl Formula {
    /// Involutive negation.
    pub fn dual(&self) -> Formula {
        match self {
            Formula::Atom(a) => Formula::NegAtom(a.clone()),
            Formula::NegAtom(a) => Formula::Atom(a.clone()),
            Formula::Par(l, r) => Formula::Tensor(Box::new(l.dual()), Box::new(r.dual())),
            Formula::Tensor(l, r) => Formula::Par(Box::new(l.dual()), Box::new(r.dual())),
            Formula::OfCourse(f) => Formula::WhyNot(Box::new(f.dual())),
            Formula::WhyNot(f) => Formula::OfCourse(Box::new(f.dual())),
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::NegAtom(a) => write!(f, "~{a}"),
            Formula::Par(l, r) => write!(f, "({l} | {r})"),
            Formula::Tensor(l, r) => write!(f, "({l} * {r})"),
            Formula::OfCourse(x) => write!(f, "!{x}"),
            Formula::WhyNot(x) => write!(f, "?{x}"),
        }
    }
}

/// The output formula of a simple type: `[i] = i`,
/// `[A -> B] = ?[A]^ | [B]`.
pub fn formula_of_type(t: &SimpleType) -> Formula {
    match t {
        SimpleType::Atom(a) => Formula::Atom(a.clone()),
        SimpleType::Arrow(a, b) => Formula::Par(
            Box::new(Formula::WhyNot(Box::new(formula_of_type(a).dual()))),
            Box::new(formula_of_type(b)),
        ),
    }
}

/// The output formula consumed by a name of stack type `S` with output `B`:
/// the curried arrow `A1 -> … -> An -> B` translated as a type.
pub fn formula_of_stacktype(s: &StackType, b: &SimpleType) -> Formula {
    formula_of_type(&s.arrow_to(b))
}

// ---------------------------------------------------------------------------
// Nets
// ---------------------------------------------------------------------------

/// One end of a wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    /// A cell port `(cell, port)`.
    Port(usize, usize),
    /// A net conclusion.
    Conc(usize),
}

/// Role of a net conclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// A variable wire `?A^`, labeled with the variable.
    Var,
    /// A name wire, labeled with the name.
    Name,
    /// The distinguished output of a term.
    Dist,
    /// The output wire of a stack.
    StackOut,
    /// The root of a stack's ⊗-tree (positive; only for stack objects).
    Root,
}

/// A free conclusion of a net.
#[derive(Debug, Clone)]
pub struct Conclusion {
    /// Interface role.
    pub role: Role,
    /// Variable or name label, when the role carries one.
    pub label: Option<String>,
    /// Formula, decorated on top-level translations.
    pub formula: Option<Formula>,
    link: Link,
}

/// A `!`-box: a promoted inner net.
#[derive(Debug, Clone)]
pub struct NetBox {
    inner: Box<Net>,
    // Inner conclusion promoted to the principal `!O` port (port 0).
    principal: usize,
    // Inner conclusions mirrored by the auxiliary ports (port `1 + i`).
    aux: Vec<usize>,
}

/// Cell kinds.
#[derive(Debug, Clone)]
pub enum CellKind {
    /// Axiom: port 0 the negative side, port 1 the positive side.
    Ax,
    /// Cut between two dual wires (ports 0 and 1, symmetric).
    Cut,
    /// `⅋`: port 0 the `?Q` premise, port 1 the output premise, port 2 the
    /// conclusion.
    Par,
    /// `⊗`: port 0 the `!O` premise, port 1 the positive premise, port 2
    /// the conclusion.
    Tensor,
    /// Dereliction: port 0 the positive premise, port 1 the `?`-conclusion.
    Der,
    /// Weakening: port 0 the conclusion.
    Weak,
    /// n-ary contraction: ports `0 .. n-1` the premises (symmetric), port
    /// `n` the conclusion.
    Contr,
    /// A `!`-box: port 0 the principal conclusion, ports `1 ..` auxiliary.
    Box_(NetBox),
}

impl CellKind {
    fn tag(&self) -> &'static str {
        match self {
            CellKind::Ax => "ax",
            CellKind::Cut => "cut",
            CellKind::Par => "par",
            CellKind::Tensor => "tensor",
            CellKind::Der => "der",
            CellKind::Weak => "weak",
            CellKind::Contr => "contr",
            CellKind::Box_(_) => "box",
        }
    }
}

#[derive(Debug, Clone)]
struct CellData {
    kind: CellKind,
    ports: Vec<Link>,
}

/// A polarized proof net.
#[derive(Debug, Clone, Default)]
pub struct Net {
    cells: Vec<Option<CellData>>,
    concs: Vec<Option<Conclusion>>,
}

// A sentinel for not-yet-wired ports.
const UNWIRED: Link = Link::Conc(usize::MAX);

impl Net {
    fn new() -> Net {
        Net::default()
    }

    fn add_cell(&mut self, kind: CellKind, arity: usize) -> usize {
        self.cells.push(Some(CellData {
            kind,
            ports: vec![UNWIRED; arity],
        }));
        self.cells.len() - 1
    }

    fn cell(&self, id: usize) -> &CellData {
        self.cells[id].as_ref().expect("live cell")
    }

    fn cell_mut(&mut self, id: usize) -> &mut CellData {
        self.cells[id].as_mut().expect("live cell")
    }

    fn set_end(&mut self, at: Link, to: Link) {
        match at {
            Link::Port(c, p) => self.cell_mut(c).ports[p] = to,
            Link::Conc(k) => self.concs[k].as_mut().expect("live conclusion").link = to,
        }
    }

    // Wires two ends together (symmetrically).  Two conclusions cannot form
    // a wire in this representation.
    fn connect(&mut self, a: Link, b: Link) {
        assert!(
            !(matches!(a, Link::Conc(_)) && matches!(b, Link::Conc(_))),
            "cannot wire two conclusions directly"
        );
        self.set_end(a, b);
        self.set_end(b, a);
    }

    fn peer(&self, l: Link) -> Link {
        match l {
            Link::Port(c, p) => self.cell(c).ports[p],
            Link::Conc(k) => self.concs[k].as_ref().expect("live conclusion").link,
        }
    }

    fn add_conclusion(&mut self, role: Role, label: Option<String>) -> usize {
        self.concs.push(Some(Conclusion {
            role,
            label,
            formula: None,
            link: UNWIRED,
        }));
        self.concs.len() - 1
    }

    fn delete_cell(&mut self, id: usize) {
        self.cells[id] = None;
    }

    fn delete_conclusion(&mut self, k: usize) {
        self.concs[k] = None;
    }

    /// Live cell ids.
    pub fn cell_ids(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].is_some()).collect()
    }

    /// Live conclusion ids.
    pub fn conclusion_ids(&self) -> Vec<usize> {
        (0..self.concs.len()).filter(|&i| self.concs[i].is_some()).collect()
    }

    /// The conclusion data for a live conclusion id.
    pub fn conclusion(&self, k: usize) -> &Conclusion {
        self.concs[k].as_ref().expect("live conclusion")
    }

    fn find_conc(&self, role: Role, label: Option<&str>) -> Option<usize> {
        self.conclusion_ids().into_iter().find(|&k| {
            let c = self.conclusion(k);
            c.role == role && c.label.as_deref() == label
        })
    }

    // Imports all cells and conclusions of `other`, returning the id
    // offsets `(cell_offset, conc_offset)`.
    fn absorb(&mut self, other: Net) -> (usize, usize) {
        let co = self.cells.len();
        let ko = self.concs.len();
        for cell in other.cells {
            self.cells.push(cell.map(|mut c| {
                for p in &mut c.ports {
                    *p = shift(*p, co, ko);
                }
                c
            }));
        }
        for conc in other.concs {
            self.concs.push(conc.map(|mut c| {
                c.link = shift(c.link, co, ko);
                c
            }));
        }
        (co, ko)
    }

    // Removes a conclusion, returning the port it was attached to.
    fn detach_conclusion(&mut self, k: usize) -> Link {
        let link = self.conclusion(k).link;
        self.delete_conclusion(k);
        link
    }

    /// Structural sanity check: symmetric wiring, no dangling ports, boxes
    /// aligned with their inner interfaces.
    pub fn validate(&self) -> Result<(), String> {
        for id in self.cell_ids() {
            let cd = self.cell(id);
            for (p, &l) in cd.ports.iter().enumerate() {
                if l == UNWIRED {
                    return Err(format!("cell {id} port {p} unwired"));
                }
                if self.peer(l) != Link::Port(id, p) {
                    return Err(format!("asymmetric wire at cell {id} port {p}"));
                }
                if let Link::Port(c2, _) = l {
                    if self.cells.get(c2).map(Option::is_none).unwrap_or(true) {
                        return Err(format!("cell {id} port {p} links a dead cell"));
                    }
                }
            }
            if let CellKind::Box_(b) = &cd.kind {
                if cd.ports.len() != 1 + b.aux.len() {
                    return Err(format!("box {id} arity mismatch"));
                }
                b.inner.validate()?;
                for &k in std::iter::once(&b.principal).chain(b.aux.iter()) {
                    if b.inner.concs.get(k).map(Option::is_none).unwrap_or(true) {
                        return Err(format!("box {id} references a dead inner conclusion"));
                    }
                }
            }
        }
        for k in self.conclusion_ids() {
            let c = self.conclusion(k);
            if c.link == UNWIRED {
                return Err(format!("conclusion {k} unwired"));
            }
            if self.peer(c.link) != Link::Conc(k) {
                return Err(format!("asymmetric wire at conclusion {k}"));
            }
        }
        Ok(())
    }

    /// Total number of cells, counting box interiors recursively.
    pub fn size(&self) -> usize {
        self.cell_ids()
            .into_iter()
            .map(|id| match &self.cell(id).kind {
                CellKind::Box_(b) => 1 + b.inner.size(),
                _ => 1,
            })
            .sum()
    }
}

fn shift(l: Link, co: usize, ko: usize) -> Link {
    match l {
        Link::Port(c, p) => Link::Port(c + co, p),
        Link::Conc(k) if l != UNWIRED => Link::Conc(k + ko),
        _ => l,
    }
}

/// Errors of this module.
#[derive(Debug, Error)]
pub enum NetError {
    /// Translation requires a typable object.
    #[error("object is not typable: {0}")]
    Untypable(#[from] TypeError),
    /// Cut-elimination exceeded its step cap.
    #[error("cut elimination exceeded {0} steps")]
    Diverged(usize),
}

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

/// Translates a typable object into its polarized proof net.
/// Administrative axiom cuts are eliminated eagerly.
pub fn translate(o: &Object) -> Result<Net, NetError> {
    let typing = infer(o)?;
    let mut net = match o {
        Object::Term(t) => tr_term(t),
        Object::Command(c) => tr_command(c),
        Object::Stack(s) => tr_stack(s),
    };
    eliminate_ax(&mut net);
    // Decorate the interface with formulas from the principal typing.
    for k in net.conclusion_ids() {
        let c = net.concs[k].as_mut().expect("live conclusion");
        c.formula = match (c.role, c.label.as_deref()) {
            (Role::Var, Some(x)) => typing
                .var_ctx
                .get(&crate::syntax::Ident::new(x))
                .map(|t| Formula::WhyNot(Box::new(formula_of_type(t).dual()))),
            (Role::Name, Some(a)) => typing
                .name_ctx
                .get(&crate::syntax::NameId::new(a))
                .map(formula_of_type),
            (Role::Dist, _) => match &typing.subject {
                SubjectType::Term(t) => Some(formula_of_type(t)),
                _ => None,
            },
            (Role::StackOut | Role::Root, _) => match &typing.subject {
                SubjectType::Stack(_) => None, // filled below
                _ => None,
            },
            _ => None,
        };
    }
    if let SubjectType::Stack(st) = &typing.subject {
        // Stack interfaces: the output formula is not determined by the
        // stack alone; pick a fresh placeholder output atom `_B`.
        let b = SimpleType::Atom("_B".to_string());
        if let Some(k) = net.find_conc(Role::StackOut, None) {
            net.concs[k].as_mut().unwrap().formula = Some(formula_of_type(&b));
        }
        if let Some(k) = net.find_conc(Role::Root, None) {
            net.concs[k].as_mut().unwrap().formula =
                Some(formula_of_stacktype(st, &b).dual());
        }
    }
    Ok(net)
}

// Merges `b` into `a`, contracting conclusions that share a (role, label)
// in the Var/Name roles.
fn combine(a: &mut Net, b: Net) {
    let (_, ko) = a.absorb(b);
    let imported: Vec<usize> = a
        .conclusion_ids()
        .into_iter()
        .filter(|&k| k >= ko)
        .collect();
    for k in imported {
        let (role, label) = {
            let c = a.conclusion(k);
            (c.role, c.label.clone())
        };
        if !matches!(role, Role::Var | Role::Name) {
            continue;
        }
        let existing = a.conclusion_ids().into_iter().find(|&j| {
            j != k && j < ko && {
                let c = a.conclusion(j);
                c.role == role && c.label == label
            }
        });
        if let Some(j) = existing {
            contract_concs(a, j, k, role, label);
        }
    }
}

// Replaces conclusions `j` and `k` by a single contracted conclusion.
fn contract_concs(net: &mut Net, j: usize, k: usize, role: Role, label: Option<String>) {
    let pj = net.detach_conclusion(j);
    let pk = net.detach_conclusion(k);
    let c = net.add_cell(CellKind::Contr, 3);
    net.connect(Link::Port(c, 0), pj);
    net.connect(Link::Port(c, 1), pk);
    let nk = net.add_conclusion(role, label);
    net.connect(Link::Port(c, 2), Link::Conc(nk));
}

// Promotes a net into a box description.  The net's distinguished output
// (role `pick`) becomes the principal; all other conclusions are auxiliary.
fn into_box(inner: Net, pick: Role) -> NetBox {
    let principal = inner
        .find_conc(pick, None)
        .or({
            // Term subnets always expose a distinguished conclusion.
            None
        })
        .expect("boxed net has a distinguished conclusion");
    let aux: Vec<usize> = inner
        .conclusion_ids()
        .into_iter()
        .filter(|&k| k != principal)
        .collect();
    NetBox {
        inner: Box::new(inner),
        principal,
        aux,
    }
}

// Adds a box cell for `nb` to `net`, contracting auxiliary wires with
// existing same-labeled conclusions.  Returns the box cell id.
fn attach_box(net: &mut Net, nb: NetBox) -> usize {
    let aux_meta: Vec<(Role, Option<String>)> = nb
        .aux
        .iter()
        .map(|&k| {
            let c = nb.inner.conclusion(k);
            (c.role, c.label.clone())
        })
        .collect();
    let arity = 1 + nb.aux.len();
    let id = net.add_cell(CellKind::Box_(nb), arity);
    for (i, (role, label)) in aux_meta.into_iter().enumerate() {
        let port = Link::Port(id, 1 + i);
        let existing = net.conclusion_ids().into_iter().find(|&j| {
            let c = net.conclusion(j);
            c.role == role && c.label == label && matches!(role, Role::Var | Role::Name)
        });
        match existing {
            Some(j) => {
                let pj = net.detach_conclusion(j);
                let c = net.add_cell(CellKind::Contr, 3);
                net.connect(Link::Port(c, 0), pj);
                net.connect(Link::Port(c, 1), port);
                let nk = net.add_conclusion(role, label);
                net.connect(Link::Port(c, 2), Link::Conc(nk));
            }
            None => {
                let nk = net.add_conclusion(role, label);
                net.connect(port, Link::Conc(nk));
            }
        }
    }
    id
}

// Detaches the wire for name `a`, or makes a weakening if the name is
// absent.  Returns the free end to be consumed.
fn take_name_wire(net: &mut Net, a: &str) -> Link {
    match net.find_conc(Role::Name, Some(a)) {
        Some(k) => net.detach_conclusion(k),
        None => {
            let w = net.add_cell(CellKind::Weak, 1);
            Link::Port(w, 0)
        }
    }
}

fn take_var_wire(net: &mut Net, x: &str) -> Link {
    match net.find_conc(Role::Var, Some(x)) {
        Some(k) => net.detach_conclusion(k),
        None => {
            let w = net.add_cell(CellKind::Weak, 1);
            Link::Port(w, 0)
        }
    }
}

fn tr_term(t: &Term) -> Net {
    match t {
        Term::Var(x) => {
            let mut net = Net::new();
            let ax = net.add_cell(CellKind::Ax, 2);
            let der = net.add_cell(CellKind::Der, 2);
            net.connect(Link::Port(ax, 1), Link::Port(der, 0));
            let kx = net.add_conclusion(Role::Var, Some(x.0.clone()));
            net.connect(Link::Port(der, 1), Link::Conc(kx));
            let kd = net.add_conclusion(Role::Dist, None);
            net.connect(Link::Port(ax, 0), Link::Conc(kd));
            net
        }
        Term::Abs(x, body) => {
            let mut net = tr_term(body);
            let xw = take_var_wire(&mut net, &x.0);
            let kd = net.find_conc(Role::Dist, None).expect("term has an output");
            let dw = net.detach_conclusion(kd);
            let par = net.add_cell(CellKind::Par, 3);
            net.connect(Link::Port(par, 0), xw);
            net.connect(Link::Port(par, 1), dw);
            let nk = net.add_conclusion(Role::Dist, None);
            net.connect(Link::Port(par, 2), Link::Conc(nk));
            net
        }
        Term::App(f, u) => {
            let mut net = tr_term(f);
            let arg = tr_term(u);
            let nb = into_box(arg, Role::Dist);
            let bx = attach_box(&mut net, nb);
            let ax = net.add_cell(CellKind::Ax, 2);
            let tens = net.add_cell(CellKind::Tensor, 3);
            net.connect(Link::Port(tens, 0), Link::Port(bx, 0));
            net.connect(Link::Port(tens, 1), Link::Port(ax, 1));
            let kd = net.find_conc(Role::Dist, None).expect("term has an output");
            let dw = net.detach_conclusion(kd);
            let cut = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(cut, 0), dw);
            net.connect(Link::Port(cut, 1), Link::Port(tens, 2));
            let nk = net.add_conclusion(Role::Dist, None);
            net.connect(Link::Port(ax, 0), Link::Conc(nk));
            net
        }
        Term::Mu(a, c) => {
            let mut net = tr_command(c);
            match net.find_conc(Role::Name, Some(&a.0)) {
                Some(k) => {
                    let conc = net.concs[k].as_mut().expect("live conclusion");
                    conc.role = Role::Dist;
                    conc.label = None;
                }
                None => {
                    let w = net.add_cell(CellKind::Weak, 1);
                    let nk = net.add_conclusion(Role::Dist, None);
                    net.connect(Link::Port(w, 0), Link::Conc(nk));
                }
            }
            net
        }
        Term::ESub(body, x, u) => {
            let mut net = tr_term(body);
            let xw = take_var_wire(&mut net, &x.0);
            let arg = tr_term(u);
            let nb = into_box(arg, Role::Dist);
            let bx = attach_box(&mut net, nb);
            let cut = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(cut, 0), Link::Port(bx, 0));
            net.connect(Link::Port(cut, 1), xw);
            net
        }
    }
}

fn tr_command(c: &Command) -> Net {
    match c {
        Command::Named(a, t) => {
            let mut net = tr_term(t);
            let kd = net.find_conc(Role::Dist, None).expect("term has an output");
            match net.find_conc(Role::Name, Some(&a.0)) {
                Some(kn) => {
                    let dw = net.detach_conclusion(kd);
                    let nw = net.detach_conclusion(kn);
                    let ct = net.add_cell(CellKind::Contr, 3);
                    net.connect(Link::Port(ct, 0), dw);
                    net.connect(Link::Port(ct, 1), nw);
                    let nk = net.add_conclusion(Role::Name, Some(a.0.clone()));
                    net.connect(Link::Port(ct, 2), Link::Conc(nk));
                }
                None => {
                    let conc = net.concs[kd].as_mut().expect("live conclusion");
                    conc.role = Role::Name;
                    conc.label = Some(a.0.clone());
                }
            }
            net
        }
        Command::ERepl(body, a, s, out) => {
            let mut net = tr_command(body);
            let aw = take_name_wire(&mut net, &a.0);
            let sn = tr_stack(s);
            combine(&mut net, sn);
            let root_k = net.find_conc(Role::Root, None).expect("stack has a root");
            let root = net.detach_conclusion(root_k);
            let cut = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(cut, 0), aw);
            net.connect(Link::Port(cut, 1), root);
            // The stack output joins any existing wires for the output name.
            let so_k = net.find_conc(Role::StackOut, None).expect("stack has an output");
            match net.find_conc(Role::Name, Some(&out.0)) {
                Some(kn) => {
                    let sw = net.detach_conclusion(so_k);
                    let nw = net.detach_conclusion(kn);
                    let ct = net.add_cell(CellKind::Contr, 3);
                    net.connect(Link::Port(ct, 0), sw);
                    net.connect(Link::Port(ct, 1), nw);
                    let nk = net.add_conclusion(Role::Name, Some(out.0.clone()));
                    net.connect(Link::Port(ct, 2), Link::Conc(nk));
                }
                None => {
                    let conc = net.concs[so_k].as_mut().expect("live conclusion");
                    conc.role = Role::Name;
                    conc.label = Some(out.0.clone());
                }
            }
            net
        }
        Command::ERen(body, a, b) => {
            let mut net = tr_command(body);
            let has_a = net.find_conc(Role::Name, Some(&a.0));
            let has_b = net.find_conc(Role::Name, Some(&b.0));
            match (has_a, has_b) {
                (Some(ka), Some(kb)) => {
                    contract_concs(&mut net, ka, kb, Role::Name, Some(b.0.clone()));
                }
                (Some(ka), None) => {
                    let conc = net.concs[ka].as_mut().expect("live conclusion");
                    conc.label = Some(b.0.clone());
                }
                (None, Some(_)) => {}
                (None, None) => {
                    let w = net.add_cell(CellKind::Weak, 1);
                    let nk = net.add_conclusion(Role::Name, Some(b.0.clone()));
                    net.connect(Link::Port(w, 0), Link::Conc(nk));
                }
            }
            net
        }
    }
}

fn tr_stack(s: &Stack) -> Net {
    let items = s.items();
    // Base: the last element closes the tree with an axiom producing the
    // stack output.
    let mut net = Net::new();
    let ax = net.add_cell(CellKind::Ax, 2);
    let kout = net.add_conclusion(Role::StackOut, None);
    net.connect(Link::Port(ax, 0), Link::Conc(kout));
    let mut root = Link::Port(ax, 1);
    for t in items.iter().rev() {
        let nb = into_box(tr_term(t), Role::Dist);
        let bx = attach_box(&mut net, nb);
        let tens = net.add_cell(CellKind::Tensor, 3);
        net.connect(Link::Port(tens, 0), Link::Port(bx, 0));
        net.connect(Link::Port(tens, 1), root);
        root = Link::Port(tens, 2);
    }
    let kroot = net.add_conclusion(Role::Root, None);
    net.connect(root, Link::Conc(kroot));
    net
}

// Eliminates every `C(ax)` cut, recursively inside boxes.
fn eliminate_ax(net: &mut Net) {
    loop {
        let mut fired = false;
        for id in net.cell_ids() {
            if net.cells[id].is_none() {
                continue;
            }
            if !matches!(net.cell(id).kind, CellKind::Cut) {
                continue;
            }
            if fire_ax_at(net, id) {
                fired = true;
            }
        }
        if !fired {
            break;
        }
    }
    for id in net.cell_ids() {
        if let Some(cd) = net.cells[id].as_mut() {
            if let CellKind::Box_(b) = &mut cd.kind {
                eliminate_ax(&mut b.inner);
            }
        }
    }
}

fn is_ax_port(net: &Net, l: Link) -> bool {
    matches!(l, Link::Port(c, _) if matches!(net.cell(c).kind, CellKind::Ax))
}

// Fires `C(ax)` at the given cut if one side is an axiom.  Returns whether
// a step was taken.
fn fire_ax_at(net: &mut Net, cut: usize) -> bool {
    let p0 = net.peer(Link::Port(cut, 0));
    let p1 = net.peer(Link::Port(cut, 1));
    let (ax_side, other) = if is_ax_port(net, p0) {
        (p0, p1)
    } else if is_ax_port(net, p1) {
        (p1, p0)
    } else {
        return false;
    };
    let Link::Port(ax, k) = ax_side else { unreachable!() };
    let through = net.peer(Link::Port(ax, 1 - k));
    if through == Link::Port(cut, 0) || through == Link::Port(cut, 1) {
        // A cut looping both ends of one axiom: the pair vanishes.
        net.delete_cell(cut);
        net.delete_cell(ax);
        return true;
    }
    if matches!(other, Link::Conc(_)) && matches!(through, Link::Conc(_)) {
        // Splicing would join two conclusions; keep the axiom as the wire.
        return false;
    }
    net.connect(other, through);
    net.delete_cell(cut);
    net.delete_cell(ax);
    true
}

// ---------------------------------------------------------------------------
// Cut elimination
// ---------------------------------------------------------------------------

/// The cut-elimination rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutRule {
    /// `C(ax)` — axiom against anything.
    Ax,
    /// `C(⊗,⅋)` — tensor against par.
    TensorPar,
    /// `C(!,w)` — box against weakening.
    BangW,
    /// `C(!,d)` — box against dereliction.
    BangD,
    /// `C(!,c)` — box against contraction.
    BangC,
    /// `C(!,!)` — box entering another box.
    BangBang,
    /// `C(⊗,w)` — ⊗-tree against weakening.
    TreeW,
    /// `C(⊗,c)` — ⊗-tree against contraction.
    TreeC,
    /// `C(⊗,!)` — ⊗-tree entering a box.
    TreeBang,
}

impl std::fmt::Display for CutRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CutRule::Ax => "C(ax)",
            CutRule::TensorPar => "C(t,p)",
            CutRule::BangW => "C(!,w)",
            CutRule::BangD => "C(!,d)",
            CutRule::BangC => "C(!,c)",
            CutRule::BangBang => "C(!,!)",
            CutRule::TreeW => "C(t,w)",
            CutRule::TreeC => "C(t,c)",
            CutRule::TreeBang => "C(t,!)",
        };
        write!(f, "{s}")
    }
}

impl CutRule {
    /// The multiplicative rules.
    pub fn multiplicative() -> &'static [CutRule] {
        &[CutRule::Ax, CutRule::TensorPar]
    }

    /// All nine rules.
    pub fn all() -> &'static [CutRule] {
        &[
            CutRule::Ax,
            CutRule::TensorPar,
            CutRule::BangW,
            CutRule::BangD,
            CutRule::BangC,
            CutRule::BangBang,
            CutRule::TreeW,
            CutRule::TreeC,
            CutRule::TreeBang,
        ]
    }
}

// Is `l` the principal port of a box?
fn is_box_principal(net: &Net, l: Link) -> bool {
    matches!(l, Link::Port(c, 0) if matches!(net.cell(c).kind, CellKind::Box_(_)))
}

fn is_box_aux(net: &Net, l: Link) -> bool {
    matches!(l, Link::Port(c, p) if p > 0 && matches!(net.cell(c).kind, CellKind::Box_(_)))
}

// Collects the cells of the ⊗-tree rooted at `root` (a tensor conclusion
// port), returning `None` if the shape is not a tree.
fn collect_tree(net: &Net, root: Link) -> Option<Vec<usize>> {
    let Link::Port(t0, 2) = root else { return None };
    if !matches!(net.cell(t0).kind, CellKind::Tensor) {
        return None;
    }
    let mut cells = Vec::new();
    let mut cur = t0;
    loop {
        cells.push(cur);
        let left = net.peer(Link::Port(cur, 0));
        let Link::Port(b, 0) = left else { return None };
        if !matches!(net.cell(b).kind, CellKind::Box_(_)) {
            return None;
        }
        cells.push(b);
        match net.peer(Link::Port(cur, 1)) {
            Link::Port(t2, 2) if matches!(net.cell(t2).kind, CellKind::Tensor) => cur = t2,
            Link::Port(ax, 1) if matches!(net.cell(ax).kind, CellKind::Ax) => {
                cells.push(ax);
                return Some(cells);
            }
            _ => return None,
        }
    }
}

/// Classifies every cut of the net (top level only), returning
/// `(cut cell id, rule)` pairs.
pub fn cut_redexes(net: &Net) -> Vec<(usize, CutRule)> {
    let mut out = Vec::new();
    for id in net.cell_ids() {
        if !matches!(net.cell(id).kind, CellKind::Cut) {
            continue;
        }
        let p0 = net.peer(Link::Port(id, 0));
        let p1 = net.peer(Link::Port(id, 1));
        if is_ax_port(net, p0) || is_ax_port(net, p1) {
            out.push((id, CutRule::Ax));
            continue;
        }
        let tensor_side = [p0, p1].into_iter().find(|&l| {
            matches!(l, Link::Port(c, 2) if matches!(net.cell(c).kind, CellKind::Tensor))
        });
        let par_side = [p0, p1].into_iter().find(|&l| {
            matches!(l, Link::Port(c, 2) if matches!(net.cell(c).kind, CellKind::Par))
        });
        if tensor_side.is_some() && par_side.is_some() {
            out.push((id, CutRule::TensorPar));
            continue;
        }
        // Box or ⊗-tree against a structural cell or a box auxiliary port.
        let principal = [p0, p1]
            .into_iter()
            .find(|&l| is_box_principal(net, l))
            .map(|l| (l, false))
            .or_else(|| {
                [p0, p1]
                    .into_iter()
                    .find(|&l| collect_tree(net, l).is_some())
                    .map(|l| (l, true))
            });
        let Some((plink, is_tree)) = principal else { continue };
        let other = if plink == p0 { p1 } else { p0 };
        let rule = match other {
            Link::Port(c, _) if matches!(net.cell(c).kind, CellKind::Weak) => {
                if is_tree {
                    CutRule::TreeW
                } else {
                    CutRule::BangW
                }
            }
            Link::Port(c, p)
                if matches!(net.cell(c).kind, CellKind::Contr)
                    && p + 1 == net.cell(c).ports.len() =>
            {
                if is_tree {
                    CutRule::TreeC
                } else {
                    CutRule::BangC
                }
            }
            Link::Port(c, 1) if matches!(net.cell(c).kind, CellKind::Der) && !is_tree => {
                CutRule::BangD
            }
            l if is_box_aux(net, l) => {
                if is_tree {
                    CutRule::TreeBang
                } else {
                    CutRule::BangBang
                }
            }
            _ => continue,
        };
        out.push((id, rule));
    }
    out
}

// A "group" behaving like a box: its cells, and the principal link facing
// the cut.
struct Group {
    cells: Vec<usize>,
    principal: Link,
}

fn group_at(net: &Net, l: Link, tree: bool) -> Group {
    if tree {
        Group {
            cells: collect_tree(net, l).expect("classified as tree"),
            principal: l,
        }
    } else {
        let Link::Port(b, 0) = l else { unreachable!("classified as box") };
        Group {
            cells: vec![b],
            principal: l,
        }
    }
}

// Frontier of a group: ports of group cells whose peers lie outside the
// group (excluding the principal link).
fn frontier(net: &Net, g: &Group) -> Vec<(Link, Link)> {
    let set: HashSet<usize> = g.cells.iter().copied().collect();
    let mut out = Vec::new();
    for &id in &g.cells {
        let arity = net.cell(id).ports.len();
        for p in 0..arity {
            let me = Link::Port(id, p);
            if me == g.principal {
                continue;
            }
            let peer = net.peer(me);
            match peer {
                Link::Port(c, _) if set.contains(&c) => {}
                _ => out.push((me, peer)),
            }
        }
    }
    out
}

// An owned snapshot of a group's cells, for duplication.
fn snapshot_group(net: &Net, g: &Group) -> Vec<(usize, CellData)> {
    g.cells
        .iter()
        .map(|&id| (id, net.cell(id).clone()))
        .collect()
}

// Instantiates a snapshot into `target`, rewiring internal links and
// leaving external ports unwired.  Returns old cell id → new cell id.
fn instantiate_group(snap: &[(usize, CellData)], target: &mut Net) -> HashMap<usize, usize> {
    let set: HashSet<usize> = snap.iter().map(|&(id, _)| id).collect();
    let mut map = HashMap::new();
    for (id, cd) in snap {
        let nid = target.add_cell(cd.kind.clone(), cd.ports.len());
        map.insert(*id, nid);
    }
    for (id, cd) in snap {
        for (p, &l) in cd.ports.iter().enumerate() {
            if let Link::Port(c, q) = l {
                if set.contains(&c) {
                    target.cell_mut(map[id]).ports[p] = Link::Port(map[&c], q);
                    continue;
                }
            }
            target.cell_mut(map[id]).ports[p] = UNWIRED;
        }
    }
    map
}

/// Fires the cut `cut_id` with the given (pre-classified) rule.
pub fn fire_cut(net: &mut Net, cut_id: usize, rule: CutRule) {
    let p0 = net.peer(Link::Port(cut_id, 0));
    let p1 = net.peer(Link::Port(cut_id, 1));
    match rule {
        CutRule::Ax => {
            let fired = fire_ax_at(net, cut_id);
            assert!(fired, "classified C(ax) must fire");
        }
        CutRule::TensorPar => {
            let (tl, pl) = if matches!(p0, Link::Port(c, 2) if matches!(net.cell(c).kind, CellKind::Tensor))
            {
                (p0, p1)
            } else {
                (p1, p0)
            };
            let Link::Port(t, _) = tl else { unreachable!() };
            let Link::Port(p, _) = pl else { unreachable!() };
            let t0 = net.peer(Link::Port(t, 0));
            let t1 = net.peer(Link::Port(t, 1));
            let q0 = net.peer(Link::Port(p, 0));
            let q1 = net.peer(Link::Port(p, 1));
            net.delete_cell(cut_id);
            net.delete_cell(t);
            net.delete_cell(p);
            let c1 = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(c1, 0), t0);
            net.connect(Link::Port(c1, 1), q0);
            let c2 = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(c2, 0), t1);
            net.connect(Link::Port(c2, 1), q1);
        }
        CutRule::BangW | CutRule::TreeW => {
            let tree = rule == CutRule::TreeW;
            let (plink, wlink) = orient(net, p0, p1, tree);
            let g = group_at(net, plink, tree);
            let fr = frontier(net, &g);
            for (_, outer) in fr {
                let w = net.add_cell(CellKind::Weak, 1);
                net.connect(Link::Port(w, 0), outer);
            }
            let Link::Port(wc, _) = wlink else { unreachable!() };
            for &id in &g.cells {
                net.delete_cell(id);
            }
            net.delete_cell(wc);
            net.delete_cell(cut_id);
        }
        CutRule::BangD => {
            let (plink, dlink) = orient(net, p0, p1, false);
            let Link::Port(bx, 0) = plink else { unreachable!() };
            let Link::Port(der, 1) = dlink else { unreachable!() };
            let CellKind::Box_(nb) = net.cell(bx).kind.clone() else { unreachable!() };
            let der_premise = net.peer(Link::Port(der, 0));
            // Splice the box interior into the ambient net.
            let aux_outer: Vec<Link> = (0..nb.aux.len())
                .map(|i| net.peer(Link::Port(bx, 1 + i)))
                .collect();
            net.delete_cell(cut_id);
            net.delete_cell(bx);
            net.delete_cell(der);
            let inner = *nb.inner;
            let (co, ko) = net.absorb(inner);
            // The promoted conclusion is cut against the dereliction premise.
            let pport = net.concs[ko + nb.principal]
                .take()
                .expect("live inner conclusion")
                .link;
            let pport = shift_done(pport, co, ko);
            let ncut = net.add_cell(CellKind::Cut, 2);
            net.connect(Link::Port(ncut, 0), pport);
            net.connect(Link::Port(ncut, 1), der_premise);
            // Auxiliary conclusions become plain wires to the old peers.
            for (i, outer) in aux_outer.into_iter().enumerate() {
                let k = ko + nb.aux[i];
                let link = net.concs[k].take().expect("live inner conclusion").link;
                let link = shift_done(link, co, ko);
                net.connect(link, outer);
            }
        }
        CutRule::BangC | CutRule::TreeC => {
            let tree = rule == CutRule::TreeC;
            let (plink, clink) = orient(net, p0, p1, tree);
            let Link::Port(contr, _) = clink else { unreachable!() };
            let n = net.cell(contr).ports.len() - 1;
            let premises: Vec<Link> = (0..n).map(|i| net.peer(Link::Port(contr, i))).collect();
            let out_peer = net.peer(Link::Port(contr, n));
            let _ = out_peer;
            let g = group_at(net, plink, tree);
            let fr = frontier(net, &g);
            // Make n copies, cutting each principal against one premise.
            let snap = snapshot_group(net, &g);
            let copies: Vec<HashMap<usize, usize>> =
                (0..n).map(|_| instantiate_group(&snap, net)).collect();
            let Link::Port(gp_cell, gp_port) = g.principal else { unreachable!() };
            for (copy, premise) in copies.iter().zip(&premises) {
                let ncut = net.add_cell(CellKind::Cut, 2);
                net.connect(Link::Port(ncut, 0), Link::Port(copy[&gp_cell], gp_port));
                net.connect(Link::Port(ncut, 1), *premise);
            }
            // Each frontier wire is shared by all copies through a fresh
            // contraction to the old peer.
            for (inner, outer) in &fr {
                let Link::Port(ic, ip) = inner else { unreachable!() };
                let ct = net.add_cell(CellKind::Contr, n + 1);
                for (i, copy) in copies.iter().enumerate() {
                    net.connect(Link::Port(ct, i), Link::Port(copy[ic], *ip));
                }
                net.connect(Link::Port(ct, n), *outer);
            }
            for &id in &g.cells {
                net.delete_cell(id);
            }
            net.delete_cell(contr);
            net.delete_cell(cut_id);
        }
        CutRule::BangBang | CutRule::TreeBang => {
            let tree = rule == CutRule::TreeBang;
            let (plink, blink) = orient(net, p0, p1, tree);
            let Link::Port(host, host_port) = blink else { unreachable!() };
            let g = group_at(net, plink, tree);
            let fr = frontier(net, &g);
            // Copy the group into the host box's interior.
            let CellKind::Box_(mut nb) = net.cell(host).kind.clone() else { unreachable!() };
            let snap = snapshot_group(net, &g);
            let map = instantiate_group(&snap, &mut nb.inner);
            // Cut the group's principal against the host's inner conclusion
            // for the consumed auxiliary port.
            let aux_idx = host_port - 1;
            let consumed = nb.aux.remove(aux_idx);
            let inner_port = nb.inner.detach_conclusion(consumed);
            let Link::Port(gp_cell, gp_port) = g.principal else { unreachable!() };
            let ncut = nb.inner.add_cell(CellKind::Cut, 2);
            nb.inner.connect(Link::Port(ncut, 0), Link::Port(map[&gp_cell], gp_port));
            nb.inner.connect(Link::Port(ncut, 1), inner_port);
            // Frontier wires become fresh auxiliary conclusions.
            let mut new_outer: Vec<Link> = Vec::new();
            for (inner, outer) in &fr {
                let Link::Port(ic, ip) = inner else { unreachable!() };
                let k = nb.inner.add_conclusion(Role::Name, None);
                nb.inner.connect(Link::Port(map[ic], *ip), Link::Conc(k));
                nb.aux.push(k);
                new_outer.push(*outer);
            }
            // Rebuild the host cell's ports: drop the consumed port, append
            // the new ones.
            let old_ports = net.cell(host).ports.clone();
            let mut ports: Vec<Link> = Vec::new();
            for (i, &l) in old_ports.iter().enumerate() {
                if i != host_port {
                    ports.push(l);
                }
            }
            ports.extend(std::iter::repeat_n(UNWIRED, new_outer.len()));
            let arity = ports.len();
            net.cells[host] = Some(CellData {
                kind: CellKind::Box_(nb),
                ports,
            });
            // Re-point peers at the shifted ports.
            for p in 0..arity {
                let l = net.cell(host).ports[p];
                if l != UNWIRED {
                    net.set_end(l, Link::Port(host, p));
                }
            }
            for (i, outer) in new_outer.into_iter().enumerate() {
                let p = arity - (fr.len() - i);
                net.connect(Link::Port(host, p), outer);
            }
            for &id in &g.cells {
                net.delete_cell(id);
            }
            net.delete_cell(cut_id);
        }
    }
}

fn shift_done(l: Link, co: usize, ko: usize) -> Link {
    // Links read out of an absorbed net are already shifted by `absorb`;
    // this helper documents that no further shifting applies.
    let _ = (co, ko);
    l
}

// Orients a classified exponential cut: returns (principal side, other).
fn orient(net: &Net, p0: Link, p1: Link, tree: bool) -> (Link, Link) {
    let is_principal = |l: Link| {
        if tree {
            collect_tree(net, l).is_some()
        } else {
            is_box_principal(net, l)
        }
    };
    if is_principal(p0) {
        (p0, p1)
    } else {
        assert!(is_principal(p1), "misclassified cut");
        (p1, p0)
    }
}

/// Normalizes under the given rules (leftmost redex first), with a step
/// cap.  Recurses into boxes.
///
/// Administrative axiom cuts are re-eliminated after every step: nets are
/// kept in the same axiom-normal representation that [`translate`]
/// produces, so splicing steps (`C(!,d)`, `C(!,!)`, `C(⊗,!)`) do not leave
/// behind axiom cuts that the translation of the reduct never had.
pub fn normalize(net: &Net, allowed: &[CutRule], cap: usize) -> Result<Net, NetError> {
    let mut cur = net.clone();
    eliminate_ax(&mut cur);
    let mut steps = 0;
    loop {
        let redex = cut_redexes(&cur)
            .into_iter()
            .find(|(_, r)| allowed.contains(r));
        match redex {
            Some((id, rule)) => {
                fire_cut(&mut cur, id, rule);
                eliminate_ax(&mut cur);
                steps += 1;
                if steps > cap {
                    return Err(NetError::Diverged(cap));
                }
            }
            None => break,
        }
    }
    for id in cur.cell_ids() {
        if let Some(cd) = cur.cells[id].as_mut() {
            if let CellKind::Box_(b) = &mut cd.kind {
                let inner = normalize(&b.inner, allowed, cap)?;
                *b.inner = inner;
            }
        }
    }
    Ok(cur)
}

/// The multiplicative normal form: the normal form under `C(ax)` and
/// `C(⊗,⅋)`.
pub fn mult_normal_form(net: &Net) -> Net {
    normalize(net, CutRule::multiplicative(), 100_000).expect("multiplicative cuts terminate")
}

// ---------------------------------------------------------------------------
// Structural equivalence ≡
// ---------------------------------------------------------------------------

// Canonical form under ≡: contractions flattened to n-ary cells with
// weakenings absorbed, structural cells hoisted out of box interfaces.
fn canonicalize(net: &mut Net) {
    loop {
        let mut changed = false;
        // Canonicalize box interiors first, then hoist through interfaces.
        for id in net.cell_ids() {
            let Some(cd) = net.cells[id].as_mut() else { continue };
            if let CellKind::Box_(b) = &mut cd.kind {
                canonicalize(&mut b.inner);
            }
        }
        for id in net.cell_ids() {
            if net.cells[id].is_none() {
                continue;
            }
            if hoist_box_interface(net, id) {
                changed = true;
            }
        }
        if absorb_weakenings(net) {
            changed = true;
        }
        if flatten_contractions(net) {
            changed = true;
        }
        if !changed {
            break;
        }
    }
}

// Moves structural cells feeding a box's auxiliary conclusions to the
// outside (box-permeable contraction / final-weakening identities).
fn hoist_box_interface(net: &mut Net, id: usize) -> bool {
    let Some(cd) = net.cells[id].as_ref() else { return false };
    let CellKind::Box_(b) = &cd.kind else { return false };
    // Find an auxiliary conclusion fed by a contraction or weakening.
    let mut found: Option<(usize, usize, bool)> = None; // (aux idx, inner cell, is_contr)
    for (i, &k) in b.aux.iter().enumerate() {
        if let Link::Port(c, p) = b.inner.conclusion(k).link {
            match &b.inner.cell(c).kind {
                CellKind::Contr if p + 1 == b.inner.cell(c).ports.len() => {
                    found = Some((i, c, true));
                    break;
                }
                CellKind::Weak => {
                    found = Some((i, c, false));
                    break;
                }
                _ => {}
            }
        }
    }
    let Some((aux_idx, inner_cell, is_contr)) = found else { return false };
    let outer_ports = net_ports(net, id);
    let CellKind::Box_(mut nb) = net.cells[id].take().expect("live cell").kind else {
        unreachable!()
    };
    // Reconstruct: detach the fed conclusion.
    let k = nb.aux.remove(aux_idx);
    nb.inner.delete_conclusion(k);
    // The outer port was 1 + aux_idx; capture its peer and the kept ports.
    let outer_peer = outer_ports[1 + aux_idx];
    let kept_ports: Vec<Link> = outer_ports
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != 1 + aux_idx)
        .map(|(_, &l)| l)
        .collect();
    let mut new_outer_targets: Vec<Link> = Vec::new();
    if is_contr {
        let n = nb.inner.cell(inner_cell).ports.len() - 1;
        let premises: Vec<Link> = (0..n)
            .map(|i| nb.inner.peer(Link::Port(inner_cell, i)))
            .collect();
        nb.inner.delete_cell(inner_cell);
        for pr in premises {
            let nk = nb.inner.add_conclusion(Role::Name, None);
            nb.inner.connect(pr, Link::Conc(nk));
            nb.aux.push(nk);
            new_outer_targets.push(UNWIRED);
        }
        // Outer: an n-ary contraction joins the new ports to the old peer.
        let arity = kept_ports.len() + new_outer_targets.len();
        install_box(net, id, nb, kept_ports, new_outer_targets.len());
        let ct = net.add_cell(CellKind::Contr, new_outer_targets.len() + 1);
        for i in 0..new_outer_targets.len() {
            let port = arity - new_outer_targets.len() + i;
            net.connect(Link::Port(id, port), Link::Port(ct, i));
        }
        net.connect(Link::Port(ct, new_outer_targets.len()), outer_peer);
    } else {
        nb.inner.delete_cell(inner_cell);
        install_box(net, id, nb, kept_ports, 0);
        let w = net.add_cell(CellKind::Weak, 1);
        net.connect(Link::Port(w, 0), outer_peer);
    }
    true
}

fn net_ports(net: &Net, id: usize) -> Vec<Link> {
    net.cells[id]
        .as_ref()
        .map(|c| c.ports.clone())
        .unwrap_or_default()
}

// Reinstates a box cell with the kept ports re-pointed and `extra` fresh
// unwired ports appended.
fn install_box(net: &mut Net, id: usize, nb: NetBox, kept_ports: Vec<Link>, extra: usize) {
    let mut ports = kept_ports;
    ports.extend(std::iter::repeat_n(UNWIRED, extra));
    let arity = ports.len();
    net.cells[id] = Some(CellData {
        kind: CellKind::Box_(nb),
        ports,
    });
    for p in 0..arity {
        let l = net.cell(id).ports[p];
        if l != UNWIRED {
            net.set_end(l, Link::Port(id, p));
        }
    }
}

// Deletes weakenings feeding contraction premises; collapses unary
// contractions.
fn absorb_weakenings(net: &mut Net) -> bool {
    let mut changed = false;
    for id in net.cell_ids() {
        if net.cells[id].is_none() {
            continue;
        }
        if !matches!(net.cell(id).kind, CellKind::Contr) {
            continue;
        }
        let n = net.cell(id).ports.len() - 1;
        let weak_premise = (0..n).find(|&i| {
            matches!(net.peer(Link::Port(id, i)),
                Link::Port(c, _) if matches!(net.cell(c).kind, CellKind::Weak))
        });
        if let Some(i) = weak_premise {
            let Link::Port(w, _) = net.peer(Link::Port(id, i)) else { unreachable!() };
            net.delete_cell(w);
            if n == 2 {
                // Collapse to a plain wire.
                let other = net.peer(Link::Port(id, 1 - i));
                let out = net.peer(Link::Port(id, 2));
                net.delete_cell(id);
                net.connect(other, out);
            } else {
                let cd = net.cells[id].take().expect("live cell");
                let mut ports = cd.ports;
                ports.remove(i);
                let arity = ports.len();
                net.cells[id] = Some(CellData {
                    kind: CellKind::Contr,
                    ports,
                });
                for p in 0..arity {
                    let l = net.cell(id).ports[p];
                    net.set_end(l, Link::Port(id, p));
                }
            }
            changed = true;
        }
    }
    changed
}

// Merges contraction trees into single n-ary cells.
fn flatten_contractions(net: &mut Net) -> bool {
    let mut changed = false;
    for id in net.cell_ids() {
        if net.cells[id].is_none() {
            continue;
        }
        if !matches!(net.cell(id).kind, CellKind::Contr) {
            continue;
        }
        let n = net.cell(id).ports.len() - 1;
        let child = (0..n).find_map(|i| match net.peer(Link::Port(id, i)) {
            Link::Port(c, p)
                if c != id
                    && matches!(net.cell(c).kind, CellKind::Contr)
                    && p + 1 == net.cell(c).ports.len() =>
            {
                Some((i, c))
            }
            _ => None,
        });
        if let Some((i, c)) = child {
            let m = net.cell(c).ports.len() - 1;
            let sub_premises: Vec<Link> = (0..m).map(|j| net.peer(Link::Port(c, j))).collect();
            let mut premises: Vec<Link> = (0..n)
                .filter(|&j| j != i)
                .map(|j| net.peer(Link::Port(id, j)))
                .collect();
            let out = net.peer(Link::Port(id, n));
            premises.extend(sub_premises);
            net.delete_cell(c);
            let arity = premises.len() + 1;
            let mut ports = premises;
            ports.push(out);
            net.cells[id] = Some(CellData {
                kind: CellKind::Contr,
                ports,
            });
            for p in 0..arity {
                let l = net.cell(id).ports[p];
                net.set_end(l, Link::Port(id, p));
            }
            changed = true;
        }
    }
    changed
}

// ---------------------------------------------------------------------------
// Isomorphism
// ---------------------------------------------------------------------------

#[derive(Clone)]
struct IsoState {
    cell_map: HashMap<usize, usize>,
    used_b: HashSet<usize>,
    port_map: HashMap<usize, HashMap<usize, usize>>,
    queue: Vec<(Link, Link)>,
}

// Symmetry class of a port within its cell kind.  Ports are
// interchangeable exactly when they share a class.
fn port_class(kind: &CellKind, arity: usize, p: usize) -> usize {
    match kind {
        CellKind::Cut => 0,
        CellKind::Contr => {
            if p + 1 == arity {
                1
            } else {
                0
            }
        }
        CellKind::Box_(_) => {
            if p == 0 {
                1
            } else {
                0
            }
        }
        _ => p + 2, // all ports rigid and distinct
    }
}

fn kinds_compatible(a: &CellKind, b: &CellKind, arity_a: usize, arity_b: usize) -> bool {
    if arity_a != arity_b {
        return false;
    }
    matches!(
        (a, b),
        (CellKind::Ax, CellKind::Ax)
            | (CellKind::Cut, CellKind::Cut)
            | (CellKind::Par, CellKind::Par)
            | (CellKind::Tensor, CellKind::Tensor)
            | (CellKind::Der, CellKind::Der)
            | (CellKind::Weak, CellKind::Weak)
            | (CellKind::Contr, CellKind::Contr)
            | (CellKind::Box_(_), CellKind::Box_(_))
    )
}

fn iso_nets(a: &Net, b: &Net, conc_pairs: &[(usize, usize)]) -> bool {
    if a.cell_ids().len() != b.cell_ids().len() {
        return false;
    }
    let conc_map: HashMap<usize, usize> = conc_pairs.iter().copied().collect();
    let mut st = IsoState {
        cell_map: HashMap::new(),
        used_b: HashSet::new(),
        port_map: HashMap::new(),
        queue: Vec::new(),
    };
    for &(ka, kb) in conc_pairs {
        st.queue.push((a.conclusion(ka).link, b.conclusion(kb).link));
    }
    solve(a, b, &conc_map, st)
}

// Records that port `pa` of cell `ca` corresponds to port `pb` of `cb`,
// propagating forced pairings.  Returns false on conflict.
fn record_port(
    a: &Net,
    b: &Net,
    st: &mut IsoState,
    ca: usize,
    pa: usize,
    cb: usize,
    pb: usize,
) -> bool {
    let cda = a.cell(ca);
    let cdb = b.cell(cb);
    if port_class(&cda.kind, cda.ports.len(), pa) != port_class(&cdb.kind, cdb.ports.len(), pb) {
        return false;
    }
    let map = st.port_map.entry(ca).or_default();
    if let Some(&q) = map.get(&pa) {
        return q == pb;
    }
    if map.values().any(|&q| q == pb) {
        return false;
    }
    map.insert(pa, pb);
    // Forced pairings: any class with exactly one unmapped port on each
    // side.
    let arity = cda.ports.len();
    let classes: HashSet<usize> = (0..arity)
        .map(|p| port_class(&cda.kind, arity, p))
        .collect();
    for class in classes {
        let rem_a: Vec<usize> = (0..arity)
            .filter(|&p| {
                port_class(&cda.kind, arity, p) == class
                    && !st.port_map.get(&ca).map(|m| m.contains_key(&p)).unwrap_or(false)
            })
            .collect();
        let rem_b: Vec<usize> = (0..arity)
            .filter(|&p| {
                port_class(&cdb.kind, arity, p) == class
                    && !st
                        .port_map
                        .get(&ca)
                        .map(|m| m.values().any(|&q| q == p))
                        .unwrap_or(false)
            })
            .collect();
        if rem_a.len() == 1 && rem_b.len() == 1 {
            st.port_map.get_mut(&ca).expect("entry exists").insert(rem_a[0], rem_b[0]);
            st.queue
                .push((a.peer(Link::Port(ca, rem_a[0])), b.peer(Link::Port(cb, rem_b[0]))));
        }
    }
    st.queue.push((a.peer(Link::Port(ca, pa)), b.peer(Link::Port(cb, pb))));
    true
}

fn match_cells(a: &Net, b: &Net, st: &mut IsoState, ca: usize, cb: usize) -> bool {
    if let Some(&known) = st.cell_map.get(&ca) {
        return known == cb;
    }
    if st.used_b.contains(&cb) {
        return false;
    }
    let cda = a.cell(ca);
    let cdb = b.cell(cb);
    if !kinds_compatible(&cda.kind, &cdb.kind, cda.ports.len(), cdb.ports.len()) {
        return false;
    }
    st.cell_map.insert(ca, cb);
    st.used_b.insert(cb);
    true
}

fn solve(a: &Net, b: &Net, conc_map: &HashMap<usize, usize>, mut st: IsoState) -> bool {
    // Deterministic propagation.
    while let Some((la, lb)) = st.queue.pop() {
        match (la, lb) {
            (Link::Conc(ka), Link::Conc(kb)) => {
                if conc_map.get(&ka) != Some(&kb) {
                    return false;
                }
            }
            (Link::Port(ca, pa), Link::Port(cb, pb)) => {
                if !match_cells(a, b, &mut st, ca, cb) {
                    return false;
                }
                let cb2 = st.cell_map[&ca];
                if !record_port(a, b, &mut st, ca, pa, cb2, pb) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    // Trial phase: unmatched cells (floating components) and unresolved
    // symmetric ports.
    let unmatched_a: Vec<usize> = a
        .cell_ids()
        .into_iter()
        .filter(|id| !st.cell_map.contains_key(id))
        .collect();
    if let Some(&ca) = unmatched_a.first() {
        let candidates: Vec<usize> = b
            .cell_ids()
            .into_iter()
            .filter(|id| !st.used_b.contains(id))
            .collect();
        for cb in candidates {
            let mut trial = st.clone();
            if !match_cells(a, b, &mut trial, ca, cb) {
                continue;
            }
            // Seed by pairing every rigid port, leaving symmetric classes
            // to propagation/trials.
            let arity = a.cell(ca).ports.len();
            let mut ok = true;
            for p in 0..arity {
                let class = port_class(&a.cell(ca).kind, arity, p);
                let singleton = (0..arity)
                    .filter(|&q| port_class(&a.cell(ca).kind, arity, q) == class)
                    .count()
                    == 1;
                if singleton && !record_port(a, b, &mut trial, ca, p, cb, p) {
                    ok = false;
                    break;
                }
            }
            if ok && solve(a, b, conc_map, trial) {
                return true;
            }
        }
        return false;
    }
    // Unresolved symmetric ports within matched cells.
    for (&ca, &cb) in &st.cell_map {
        let arity = a.cell(ca).ports.len();
        let mapped = st.port_map.get(&ca).cloned().unwrap_or_default();
        if mapped.len() == arity {
            continue;
        }
        let pa = (0..arity).find(|p| !mapped.contains_key(p)).expect("unmapped port");
        let class = port_class(&a.cell(ca).kind, arity, pa);
        for pb in 0..arity {
            if mapped.values().any(|&q| q == pb) {
                continue;
            }
            if port_class(&b.cell(cb).kind, arity, pb) != class {
                continue;
            }
            let mut trial = st.clone();
            if record_port(a, b, &mut trial, ca, pa, cb, pb) && solve(a, b, conc_map, trial) {
                return true;
            }
        }
        return false;
    }
    // Fully matched: recurse into boxes with the induced interfaces.
    for (&ca, &cb) in &st.cell_map {
        let (CellKind::Box_(ba), CellKind::Box_(bb)) = (&a.cell(ca).kind, &b.cell(cb).kind)
        else {
            continue;
        };
        let pm = st.port_map.get(&ca).cloned().unwrap_or_default();
        let mut pairs = vec![(ba.principal, bb.principal)];
        for (i, &ka) in ba.aux.iter().enumerate() {
            let Some(&pj) = pm.get(&(1 + i)) else { return false };
            pairs.push((ka, bb.aux[pj - 1]));
        }
        if !iso_nets(&ba.inner, &bb.inner, &pairs) {
            return false;
        }
    }
    true
}

// Drops top-level variable and name conclusions fed directly by a
// weakening.  Erasing reduction steps shrink the relevant contexts, so the
// simulation statements hold only up to such final weakenings.
fn drop_final_weakenings(net: &mut Net) {
    for k in net.conclusion_ids() {
        let c = net.conclusion(k);
        if !matches!(c.role, Role::Var | Role::Name) {
            continue;
        }
        if let Link::Port(w, _) = c.link {
            if matches!(net.cell(w).kind, CellKind::Weak) {
                net.delete_cell(w);
                net.delete_conclusion(k);
            }
        }
    }
}

/// Structural equivalence `≡` of two nets: canonicalize, drop final
/// weakenings, and test label-anchored isomorphism.
pub fn ppn_equiv(a: &Net, b: &Net) -> bool {
    let mut ca = a.clone();
    let mut cb = b.clone();
    canonicalize(&mut ca);
    canonicalize(&mut cb);
    drop_final_weakenings(&mut ca);
    drop_final_weakenings(&mut cb);
    // Interfaces must agree on (role, label) multisets.
    let key = |n: &Net| {
        let mut v: Vec<(Role, Option<String>)> = n
            .conclusion_ids()
            .into_iter()
            .map(|k| (n.conclusion(k).role, n.conclusion(k).label.clone()))
            .collect();
        v.sort();
        v
    };
    if key(&ca) != key(&cb) {
        return false;
    }
    // Anchor conclusions by (role, label); duplicates would need trials but
    // cannot arise at the top level of a translation.
    let mut pairs = Vec::new();
    let mut taken: HashSet<usize> = HashSet::new();
    for ka in ca.conclusion_ids() {
        let c = ca.conclusion(ka);
        let kb = cb
            .conclusion_ids()
            .into_iter()
            .find(|&j| {
                !taken.contains(&j) && {
                    let d = cb.conclusion(j);
                    d.role == c.role && d.label == c.label
                }
            })
            .expect("interfaces agree");
        taken.insert(kb);
        pairs.push((ka, kb));
    }
    iso_nets(&ca, &cb, &pairs)
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// The cut rules a rule class may use in the simulation theorem (besides
/// `≡`).
pub fn allowed_rules(tag: RuleTag) -> &'static [CutRule] {
    match tag {
        RuleTag::DB => &[CutRule::Ax, CutRule::TensorPar],
        RuleTag::S => &[
            CutRule::Ax,
            CutRule::BangW,
            CutRule::BangD,
            CutRule::BangC,
            CutRule::BangBang,
        ],
        RuleTag::DM | RuleTag::N | RuleTag::C | RuleTag::W => &[],
        RuleTag::Nnl | RuleTag::Cnl | RuleTag::Wnl | RuleTag::Rnl => {
            &[CutRule::TreeW, CutRule::TreeC, CutRule::TreeBang]
        }
        RuleTag::Beta | RuleTag::MuLM => &[],
    }
}

/// Checks the simulation of one reduction step: the translations of redex
/// and reduct, normalized under the rule class's allowed cut rules, must be
/// `≡`-equivalent.  For the multiplicative rules (`dM`, `N`, `C`, `W`) no
/// cut rule is allowed and the nets must be `≡` outright.
pub fn simulate_check(step: &Step) -> Result<bool, NetError> {
    let before = translate(&step.before)?;
    let after = translate(&step.after)?;
    let allowed = allowed_rules(step.rule);
    let nb = normalize(&before, allowed, 50_000)?;
    let na = normalize(&after, allowed, 50_000)?;
    Ok(ppn_equiv(&nb, &na))
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// JSON rendering of a net.
pub fn net_to_json(net: &Net) -> Value {
    let cells: Vec<Value> = net
        .cell_ids()
        .into_iter()
        .map(|id| {
            let cd = net.cell(id);
            let mut v = json!({
                "id": id,
                "kind": cd.kind.tag(),
                "ports": cd.ports.iter().map(|l| match l {
                    Link::Port(c, p) => json!({"cell": c, "port": p}),
                    Link::Conc(k) => json!({"conclusion": k}),
                }).collect::<Vec<_>>(),
            });
            if let CellKind::Box_(b) = &cd.kind {
                v["inner"] = net_to_json(&b.inner);
            }
            v
        })
        .collect();
    let concs: Vec<Value> = net
        .conclusion_ids()
        .into_iter()
        .map(|k| {
            let c = net.conclusion(k);
            json!({
                "id": k,
                "role": format!("{:?}", c.role).to_lowercase(),
                "label": c.label,
                "formula": c.formula.as_ref().map(|f| f.to_string()),
            })
        })
        .collect();
    json!({"cells": cells, "conclusions": concs})
}

/// Graphviz DOT rendering of a net, with boxes as clusters.
pub fn net_to_dot(net: &Net) -> String {
    let mut out = String::from("graph net {\n  node [shape=box, fontsize=10];\n");
    dot_body(net, "n", &mut out);
    out.push_str("}\n");
    out
}

fn dot_body(net: &Net, prefix: &str, out: &mut String) {
    use std::fmt::Write;
    for id in net.cell_ids() {
        let cd = net.cell(id);
        match &cd.kind {
            CellKind::Box_(b) => {
                let _ = writeln!(out, "  subgraph cluster_{prefix}_{id} {{ label=\"!\";");
                let inner_prefix = format!("{prefix}_{id}");
                dot_body(&b.inner, &inner_prefix, out);
                let _ = writeln!(out, "  }}");
                let _ = writeln!(out, "  {prefix}_{id} [label=\"box\"];");
            }
            k => {
                let _ = writeln!(out, "  {prefix}_{id} [label=\"{}\"];", k.tag());
            }
        }
    }
    for k in net.conclusion_ids() {
        let c = net.conclusion(k);
        let label = match (&c.label, &c.formula) {
            (Some(l), Some(f)) => format!("{l} : {f}"),
            (Some(l), None) => l.clone(),
            (None, Some(f)) => format!("{:?} : {f}", c.role).to_lowercase(),
            (None, None) => format!("{:?}", c.role).to_lowercase(),
        };
        let _ = writeln!(
            out,
            "  {prefix}_c{k} [shape=plaintext, label=\"{label}\"];"
        );
    }
    // Edges: emit each wire once, from the lexicographically smaller end.
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for id in net.cell_ids() {
        for (p, &l) in net.cell(id).ports.iter().enumerate() {
            match l {
                Link::Port(c2, p2) => {
                    if seen.contains(&(c2, p2)) {
                        continue;
                    }
                    seen.insert((id, p));
                    let _ = writeln!(out, "  {prefix}_{id} -- {prefix}_{c2};");
                }
                Link::Conc(k) => {
                    let _ = writeln!(out, "  {prefix}_{id} -- {prefix}_c{k};");
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
