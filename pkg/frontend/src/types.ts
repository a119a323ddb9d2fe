// Payload shapes of the SLA service endpoints.

export type Scope = "application" | "activity" | "layer" | "model";
export type Priority = "high" | "normal" | "low";

export interface MetricDefinition {
  metric_id: string;
  display_name: string;
  category: "slo" | "config";
  value_type: "numeric" | "percentage" | "enum" | "boolean" | "string";
  unit: string;
  range_min: number | null;
  range_max: number | null;
  enum_values: string[] | null;
  allowed_operators: string[];
}

export interface ActivityEntry {
  name: string;
  deployment_layer: string;
  programming_model: string | null;
}

export interface ActivitySchema {
  name: string;
  deployment_layer: string;
  programming_model: string | null;
  metrics: {
    activity: MetricDefinition[];
    layer: MetricDefinition[];
    model: MetricDefinition[];
  };
}

export interface Finding {
  code: string;
  severity: "error" | "warning";
  path: string;
  message: string;
}

export interface ValidationReport {
  valid: boolean;
  findings: Finding[];
}

export interface StoredSummary {
  id: string;
  application_type: string;
  created_at: string;
  size_bytes: number;
}

export interface CreateResult {
  id: string;
  summary: StoredSummary;
}

export interface ServiceError {
  code: string;
  message: string;
}

// Document JSON written by the wizard (the service owns canonical key order).

export interface ConstraintJson {
  metric_id: string;
  priority: Priority;
  operator: string;
  value: number | string | boolean;
  unit: string;
}

export interface BindingJson {
  name: string;
  constraints: ConstraintJson[];
}

export interface ActivityNodeJson {
  id: string;
  name: string;
  deployment_layer: BindingJson;
  programming_model: BindingJson | null;
  constraints: ConstraintJson[];
}

export interface SlaDocumentJson {
  schema_version: string;
  application: {
    type: string;
    agreement_start: string;
    agreement_end: string;
  };
  slos: ConstraintJson[];
  workflow: {
    activities: ActivityNodeJson[];
    edges: { from: string; to: string }[];
  };
}
