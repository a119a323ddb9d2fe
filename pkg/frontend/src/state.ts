import type {
  ActivitySchema,
  ConstraintJson,
  MetricDefinition,
  Priority,
  Scope,
  SlaDocumentJson,
  ValidationReport,
} from "./types.js";

export type StepId = "app_slos" | "workflow_select" | "activity_forms" | "review";

export const STEP_ORDER: StepId[] = [
  "app_slos",
  "workflow_select",
  "activity_forms",
  "review",
];

/** One checkbox row of a constraint form; `value` is the raw input text. */
export interface ConstraintEntry {
  metric_id: string;
  checked: boolean;
  priority: Priority;
  operator: string;
  value: string;
}

export interface ActivityForms {
  activity: ConstraintEntry[];
  layer: ConstraintEntry[];
  model: ConstraintEntry[];
}

export interface WizardState {
  step: StepId;
  header: { type: string; agreement_start: string; agreement_end: string };
  appSlos: ConstraintEntry[];
  selected: string[];
  advancedEdges: boolean;
  edges: { from: string; to: string }[];
  forms: Record<string, ActivityForms>;
  report: ValidationReport | null;
  createdId: string | null;
}

export function initialState(): WizardState {
  return {
    step: "app_slos",
    header: { type: "", agreement_start: "", agreement_end: "" },
    appSlos: [],
    selected: [],
    advancedEdges: false,
    edges: [],
    forms: {},
    report: null,
    createdId: null,
  };
}

export function entryFor(metric: MetricDefinition): ConstraintEntry {
  let value = "";
  if (metric.value_type === "enum" && metric.enum_values?.length) {
    value = metric.enum_values[0];
  } else if (metric.value_type === "boolean") {
    value = "true";
  }
  return {
    metric_id: metric.metric_id,
    checked: false,
    priority: "normal",
    operator: metric.allowed_operators[0],
    value,
  };
}

/** Sync form rows with the fetched metric lists, keeping user edits. */
export function syncEntries(
  existing: ConstraintEntry[],
  metrics: MetricDefinition[],
): ConstraintEntry[] {
  const byId = new Map(existing.map((entry) => [entry.metric_id, entry]));
  return metrics.map((metric) => byId.get(metric.metric_id) ?? entryFor(metric));
}

export function ensureForms(
  state: WizardState,
  name: string,
  schema: ActivitySchema,
): void {
  const current = state.forms[name] ?? { activity: [], layer: [], model: [] };
  state.forms[name] = {
    activity: syncEntries(current.activity, schema.metrics.activity),
    layer: syncEntries(current.layer, schema.metrics.layer),
    model: syncEntries(current.model, schema.metrics.model),
  };
}

export function toggleActivity(state: WizardState, name: string): void {
  const index = state.selected.indexOf(name);
  if (index >= 0) {
    state.selected.splice(index, 1);
  } else {
    state.selected.push(name);
  }
  state.edges = state.edges.filter(
    (edge) => nodeIdOf(state, edge.from) && nodeIdOf(state, edge.to),
  );
}

function nodeIdOf(state: WizardState, id: string): boolean {
  const count = state.selected.length;
  for (let i = 1; i <= count; i += 1) {
    if (`n${i}` === id) return true;
  }
  return false;
}

export function moveActivity(state: WizardState, name: string, delta: -1 | 1): void {
  const index = state.selected.indexOf(name);
  const target = index + delta;
  if (index < 0 || target < 0 || target >= state.selected.length) return;
  const item = state.selected[index];
  state.selected[index] = state.selected[target];
  state.selected[target] = item;
}

/** Chain edges in selection order; explicit edges in advanced mode. */
export function effectiveEdges(state: WizardState): { from: string; to: string }[] {
  if (state.advancedEdges) return state.edges;
  const edges: { from: string; to: string }[] = [];
  for (let i = 1; i < state.selected.length; i += 1) {
    edges.push({ from: `n${i}`, to: `n${i + 1}` });
  }
  return edges;
}

export interface StepProblem {
  field: string;
  message: string;
}

/** Local completeness only; the service owns semantic validation. */
export function stepProblems(state: WizardState): StepProblem[] {
  const problems: StepProblem[] = [];
  if (state.step === "app_slos") {
    if (!state.header.type.trim()) {
      problems.push({ field: "header.type", message: "Application type is required" });
    }
    if (!state.header.agreement_start) {
      problems.push({ field: "header.agreement_start", message: "Start date is required" });
    }
    if (!state.header.agreement_end) {
      problems.push({ field: "header.agreement_end", message: "End date is required" });
    }
    for (const entry of state.appSlos) {
      if (entry.checked && !entry.value.trim()) {
        problems.push({
          field: `app_slo:${entry.metric_id}`,
          message: `Set a value for ${entry.metric_id}`,
        });
      }
    }
  } else if (state.step === "workflow_select") {
    if (state.selected.length === 0) {
      problems.push({ field: "workflow", message: "Select at least one activity" });
    }
  } else if (state.step === "activity_forms") {
    for (const name of state.selected) {
      const forms = state.forms[name];
      if (!forms) continue;
      for (const scope of ["activity", "layer", "model"] as const) {
        for (const entry of forms[scope]) {
          if (entry.checked && !entry.value.trim()) {
            problems.push({
              field: `metric:${name}:${scope}:${entry.metric_id}`,
              message: `Set a value for ${entry.metric_id}`,
            });
          }
        }
      }
    }
  }
  return problems;
}

export function advance(state: WizardState): boolean {
  if (stepProblems(state).length > 0) return false;
  const index = STEP_ORDER.indexOf(state.step);
  if (index < 0 || index === STEP_ORDER.length - 1) return false;
  state.step = STEP_ORDER[index + 1];
  return true;
}

export function back(state: WizardState): void {
  const index = STEP_ORDER.indexOf(state.step);
  if (index > 0) state.step = STEP_ORDER[index - 1];
}

function coerceValue(
  raw: string,
  metric: MetricDefinition | undefined,
): number | string | boolean {
  if (!metric) return raw;
  if (metric.value_type === "numeric" || metric.value_type === "percentage") {
    const trimmed = raw.trim();
    if (trimmed !== "" && Number.isFinite(Number(trimmed))) {
      return Number(trimmed);
    }
    return raw;
  }
  if (metric.value_type === "boolean") return raw === "true";
  return raw;
}

function constraintsFrom(
  entries: ConstraintEntry[],
  metrics: MetricDefinition[],
): ConstraintJson[] {
  const defs = new Map(metrics.map((m) => [m.metric_id, m]));
  const out: ConstraintJson[] = [];
  for (const entry of entries) {
    if (!entry.checked) continue; // unchecked metrics are omitted entirely
    const metric = defs.get(entry.metric_id);
    out.push({
      metric_id: entry.metric_id,
      priority: entry.priority,
      operator: entry.operator,
      value: coerceValue(entry.value, metric),
      unit: metric?.unit ?? "",
    });
  }
  return out;
}

/**
 * Assemble the full document body. Activities keep selection order (the
 * service re-orders canonically); bindings come from the fetched schemas.
 */
export function buildDocument(
  state: WizardState,
  appMetrics: MetricDefinition[],
  schemas: Record<string, ActivitySchema>,
): SlaDocumentJson {
  const activities = state.selected.map((name, index) => {
    const schema = schemas[name];
    const forms = state.forms[name] ?? { activity: [], layer: [], model: [] };
    return {
      id: `n${index + 1}`,
      name,
      deployment_layer: {
        name: schema.deployment_layer,
        constraints: constraintsFrom(forms.layer, schema.metrics.layer),
      },
      programming_model: schema.programming_model
        ? {
            name: schema.programming_model,
            constraints: constraintsFrom(forms.model, schema.metrics.model),
          }
        : null,
      constraints: constraintsFrom(forms.activity, schema.metrics.activity),
    };
  });

  return {
    schema_version: "1.0",
    application: {
      type: state.header.type,
      agreement_start: state.header.agreement_start,
      agreement_end: state.header.agreement_end,
    },
    slos: constraintsFrom(state.appSlos, appMetrics),
    workflow: { activities, edges: effectiveEdges(state) },
  };
}

export function constraintScopeOf(scope: Scope): keyof ActivityForms {
  return scope === "application" ? "activity" : (scope as keyof ActivityForms);
}

// --- persistence (survives refresh during steps a-c) ---

const STORAGE_KEY = "sla-wizard-state-v1";

export interface StateStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export function saveState(state: WizardState, storage: StateStorage): void {
  try {
    storage.setItem(STORAGE_KEY, JSON.stringify(state));
  } catch {
    // Private-mode or quota failures must never break the wizard.
  }
}

export function loadState(storage: StateStorage): WizardState | null {
  try {
    const raw = storage.getItem(STORAGE_KEY);
    if (!raw) return null;
    const parsed = JSON.parse(raw) as WizardState;
    if (!STEP_ORDER.includes(parsed.step)) return null;
    return parsed;
  } catch {
    return null;
  }
}

export function clearState(storage: StateStorage): void {
  try {
    storage.removeItem(STORAGE_KEY);
  } catch {
    // ignore
  }
}
