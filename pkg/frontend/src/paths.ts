import type { WizardState, StepId } from "./state.js";
import type { Finding } from "./types.js";

/**
 * Where a validation finding lands in the wizard: the step to show and the
 * `data-field` key of the element to highlight. Total over every path the
 * service emits; anything unrecognized anchors to the review banner.
 */
export interface Anchor {
  step: StepId;
  field: string;
}

const ACTIVITY_PATH =
  /^workflow\.activities\[(\d+)\](?:\.(layer|model)\.constraints\[(\d+)\]|\.constraints\[(\d+)\])?$/;
const APP_SLO_PATH = /^app_slos\[(\d+)\]$/;
const EDGE_PATH = /^workflow\.edges\[(\d+)\]$/;

function checkedAt(
  entries: { metric_id: string; checked: boolean }[],
  index: number,
): string | null {
  const checked = entries.filter((entry) => entry.checked);
  return checked[index]?.metric_id ?? null;
}

export function resolveFindingAnchor(finding: Finding, state: WizardState): Anchor {
  const path = finding.path;

  if (path === "header") {
    return { step: "app_slos", field: "header.agreement_start" };
  }
  if (path === "schema_version" || path === "") {
    return { step: "review", field: "global" };
  }
  if (path === "workflow") {
    return { step: "workflow_select", field: "workflow" };
  }
  if (EDGE_PATH.test(path)) {
    return { step: "workflow_select", field: "edges" };
  }

  const appSlo = APP_SLO_PATH.exec(path);
  if (appSlo) {
    const metricId = checkedAt(state.appSlos, Number(appSlo[1]));
    return metricId
      ? { step: "app_slos", field: `app_slo:${metricId}` }
      : { step: "app_slos", field: "header.type" };
  }

  const activity = ACTIVITY_PATH.exec(path);
  if (activity) {
    const name = state.selected[Number(activity[1])];
    if (name === undefined) return { step: "review", field: "global" };
    const scope = activity[2] ?? (activity[4] !== undefined ? "activity" : null);
    if (scope === null) {
      return { step: "activity_forms", field: `activity:${name}` };
    }
    const constraintIndex = Number(activity[3] ?? activity[4]);
    const forms = state.forms[name];
    const group = forms?.[scope as "layer" | "model" | "activity"] ?? [];
    const metricId = checkedAt(group, constraintIndex);
    return metricId
      ? { step: "activity_forms", field: `metric:${name}:${scope}:${metricId}` }
      : { step: "activity_forms", field: `activity:${name}` };
  }

  return { step: "review", field: "global" };
}

/** Group findings by the field key their paths resolve to. */
export function findingsByField(
  findings: Finding[],
  state: WizardState,
): Map<string, Finding[]> {
  const grouped = new Map<string, Finding[]>();
  for (const finding of findings) {
    const anchor = resolveFindingAnchor(finding, state);
    const bucket = grouped.get(anchor.field) ?? [];
    bucket.push(finding);
    grouped.set(anchor.field, bucket);
  }
  return grouped;
}
