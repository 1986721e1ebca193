#pragma once

#include <string>

// One question answered in four tagged formats (which heading fits a list of
// bullet points -> "Project Objectives").
namespace heading {

inline const std::string kDirect = R"(<ANSWER>
Project Objectives
</ANSWER>)";

inline const std::string kShortCot = R"(<COT>
The bullet points outline specific, measurable goals to be achieved within a specified timeframe after implementing a new EHR system. They focus on outcomes or targets that the proposal aims to achieve, which aligns with the heading \"Project Objectives.\" The other options do not match the content of the bullet points as closely.
</COT>
<ANSWER>
Project Objectives
</ANSWER>)";

inline const std::string kFunction = R"(def determine_heading_for_bullet_points():
    headings = [
        "Potential Solutions",
        "Project Objectives",
        "Statement of the Problem",
        "Implementation Plan"
    ]
    bullet_points = [
        "Reduce medical errors by 25%",
        "Increase patient satisfaction with the EHR system by 10%",
        "Reduce administrative costs associated with the EHR system by 15%"
    ]
    # Analysis:
    # The bullet points are all specific, measurable targets to be achieved after implementation.
    # This matches the definition of "Project Objectives" best.
    # They are not solutions, not a problem statement, and not an implementation plan.
    answer = "Project Objectives"
    index = headings.index(answer)
    return {
        'bullet_points': bullet_points,
        'chosen_heading': answer,
        'heading_index': index,
        'answer': answer
    })";

inline const std::string kCallLine = "determine_heading_for_bullet_points()";

inline const std::string kCode = "<CODE>\n" + kFunction + "\n\n>>> " + kCallLine + R"(
</CODE>
<OBSERVATION>
output = {
    'bullet_points': [
        "Reduce medical errors by 25%",
        "Increase patient satisfaction with the EHR system by 10%",
        "Reduce administrative costs associated with the EHR system by 15%"
    ],
    'chosen_heading': 'Project Objectives',
    'heading_index': 1,
    'answer': 'Project Objectives'
}</OBSERVATION>
<ANSWER>
Project Objectives
</ANSWER>)";

inline const std::string kLongCot = R"(<LONG_COT>
Got it, let's see. The question is about finding the right heading for those bullet points. First, I need to remember what each section title means.

The bullet points are all about specific, measurable goals: reduce errors by 25%, increase satisfaction by 10%, reduce costs by 15%.

- Potential Solutions: That's what you might do to solve a problem, not the goals.

- Project Objectives: Objectives are the specific goals a project aims to achieve. That fits because these are the things the project (implementing the EHR) wants to accomplish.

- Statement of the Problem: That's about the issues or problems that need to be addressed, not the goals.

- Implementation Plan: That's how you'll carry out the project, like steps or timeline, not the goals themselves.

So the bullet points are clearly the objectives of the project. The heading should be Project Objectives.
</LONG_COT>
<ANSWER>
Project Objectives
</ANSWER>)";

}  // namespace heading
